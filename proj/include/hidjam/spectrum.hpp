#pragma once

// Band plan, raised-cosine emitters and the link-budget quantities built on them:
// the user's received SINR, the SINR a sensing jammer sees in every channel, and
// the per-channel spectrum frame observed at the receiver.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hidjam/types.hpp"

namespace hidjam {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double v) { return 10.0 * std::log10(v); }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

struct ChannelPlan {
  double f_start = 0.0;
  double f_end = 10e6;
  int num_channels = 10;
  double resolution = 1e3;  // quadrature bin width, Hz

  double width() const { return (f_end - f_start) / num_channels; }
  double lower_edge(Channel n) const { return f_start + (n - 1) * width(); }
  double center(Channel n) const { return f_start + (n - 0.5) * width(); }
  bool contains(Channel n) const { return n >= 1 && n <= num_channels; }

  void validate() const {
    if (!(f_end > f_start)) throw std::invalid_argument("channel plan: f_end must exceed f_start");
    if (num_channels < 1) throw std::invalid_argument("channel plan: num_channels must be positive");
    if (!(resolution > 0.0)) throw std::invalid_argument("channel plan: resolution must be positive");
    const double bins = width() / resolution;
    if (std::abs(bins - std::round(bins)) > 1e-9 * bins)
      throw std::invalid_argument("channel plan: resolution must divide the channel width");
  }
};

enum class EmitterRole { user, jammer, environment };

// Symbol bandwidth always equals the plan's channel width.
struct EmitterSpec {
  double power_dbm = 30.0;
  double rolloff = 0.5;
  EmitterRole role = EmitterRole::user;

  double watts() const { return dbm_to_watts(power_dbm); }

  void validate() const {
    if (!(rolloff >= 0.0 && rolloff <= 1.0))
      throw std::invalid_argument("emitter: rolloff must lie in [0, 1]");
    if (std::isnan(power_dbm) || power_dbm == std::numeric_limits<double>::infinity())
      throw std::invalid_argument("emitter: power must be finite");
  }
};

struct LinkGains {
  double tr_db = -60.0;   // transmitter -> receiver
  double tj_db = -80.0;   // transmitter -> jammer
  double jr_db = -70.0;   // jammer -> receiver
  double ej_db = -50.0;   // environment -> jammer
  double er_db = -100.0;  // environment -> receiver
};

struct NoiseModel {
  double psd_dbm_hz = -140.0;

  double channel_watts(const ChannelPlan& plan) const {
    return dbm_to_watts(psd_dbm_hz) * plan.width();
  }
};

struct SpectrumFrame {
  std::vector<double> samples_db;  // dBm per channel, index n-1 for channel n
  std::int64_t timestamp = 0;      // sense sub-slot index
};

struct Transmission {
  Channel channel = kNone;
  EmitterSpec spec;
};

struct Scene {
  std::optional<Transmission> user;
  std::optional<Transmission> jammer;
  std::vector<Transmission> environment;
};

// Unit-peak raised-cosine spectrum H(f) for symbol bandwidth `bw`; integrates to bw.
inline double raised_cosine_shape(double f, double bw, double rolloff) {
  const double af = std::abs(f);
  const double flat = (1.0 - rolloff) * bw / 2.0;
  const double edge = (1.0 + rolloff) * bw / 2.0;
  if (af <= flat) return 1.0;
  if (af > edge) return 0.0;
  return 0.5 * (1.0 + std::cos(std::numbers::pi * (af - flat) / (rolloff * bw)));
}

// Fraction of total emitted power below baseband frequency x, closed form.
inline double raised_cosine_cdf(double x, double bw, double rolloff) {
  const double ax = std::abs(x);
  const double flat = (1.0 - rolloff) * bw / 2.0;
  const double edge = (1.0 + rolloff) * bw / 2.0;
  double half;  // integral of H over [0, |x|]
  if (ax <= flat) {
    half = ax;
  } else if (ax >= edge) {
    half = bw / 2.0;
  } else {
    const double span = rolloff * bw;
    half = flat + 0.5 * (ax - flat) +
           span / (2.0 * std::numbers::pi) * std::sin(std::numbers::pi * (ax - flat) / span);
  }
  const double below = x >= 0.0 ? bw / 2.0 + half : bw / 2.0 - half;
  return below / bw;
}

inline void require_channel(const ChannelPlan& plan, Channel n, const char* what) {
  if (!plan.contains(n))
    throw std::domain_error(std::string(what) + ": channel " + std::to_string(n) +
                            " outside [1, " + std::to_string(plan.num_channels) + "]");
}

// Share of an emitter's power that lands in `target_channel` when it is centred on
// `emitter_channel`. Power beyond the band edges is simply lost.
inline double channel_power_fraction(Channel emitter_channel, Channel target_channel,
                                     const EmitterSpec& spec, const ChannelPlan& plan) {
  require_channel(plan, emitter_channel, "channel_power_fraction");
  require_channel(plan, target_channel, "channel_power_fraction");
  const double bw = plan.width();
  const double offset = (target_channel - emitter_channel) * bw;
  return raised_cosine_cdf(offset + bw / 2.0, bw, spec.rolloff) -
         raised_cosine_cdf(offset - bw / 2.0, bw, spec.rolloff);
}

inline double received_in_channel(const Transmission& tx, double gain_db, Channel n,
                                  const ChannelPlan& plan) {
  return db_to_linear(gain_db) * tx.spec.watts() *
         channel_power_fraction(tx.channel, n, tx.spec, plan);
}

// Linear SINR of the user at its receiver.
inline double user_sinr(const ChannelPlan& plan, const LinkGains& gains, const NoiseModel& noise,
                        const Scene& scene) {
  if (!scene.user) throw std::invalid_argument("user_sinr: scene has no user");
  const Transmission& user = *scene.user;
  require_channel(plan, user.channel, "user_sinr");
  double denom = noise.channel_watts(plan);
  if (scene.jammer) denom += received_in_channel(*scene.jammer, gains.jr_db, user.channel, plan);
  for (const auto& env : scene.environment)
    denom += received_in_channel(env, gains.er_db, user.channel, plan);
  return db_to_linear(gains.tr_db) * user.spec.watts() / denom;
}

// Linear SINR of the user's signal as sensed by the jammer, one entry per channel.
// The jammer's own emission enters the denominator only when `self_jamming` is set.
inline std::vector<double> jammer_sensed_sinr(const ChannelPlan& plan, const LinkGains& gains,
                                              const NoiseModel& noise, const Scene& scene,
                                              bool self_jamming = false) {
  std::vector<double> out(plan.num_channels, 0.0);
  if (!scene.user) return out;
  const double noise_w = noise.channel_watts(plan);
  for (Channel n = 1; n <= plan.num_channels; ++n) {
    const double signal = received_in_channel(*scene.user, gains.tj_db, n, plan);
    double denom = noise_w;
    for (const auto& env : scene.environment) denom += received_in_channel(env, gains.ej_db, n, plan);
    if (self_jamming && scene.jammer) denom += received_in_channel(*scene.jammer, gains.jr_db, n, plan);
    out[n - 1] = signal / denom;
  }
  return out;
}

// Total received power per channel in watts, as seen by the user's spectrum sensor.
inline std::vector<double> receiver_channel_watts(const ChannelPlan& plan, const LinkGains& gains,
                                                  const NoiseModel& noise, const Scene& scene) {
  std::vector<double> watts(plan.num_channels, noise.channel_watts(plan));
  for (Channel n = 1; n <= plan.num_channels; ++n) {
    double& w = watts[n - 1];
    if (scene.user) w += received_in_channel(*scene.user, gains.tr_db, n, plan);
    if (scene.jammer) w += received_in_channel(*scene.jammer, gains.jr_db, n, plan);
    for (const auto& env : scene.environment) w += received_in_channel(env, gains.er_db, n, plan);
  }
  return watts;
}

inline SpectrumFrame receiver_spectrum_frame(const ChannelPlan& plan, const LinkGains& gains,
                                             const NoiseModel& noise, const Scene& scene,
                                             std::int64_t timestamp) {
  SpectrumFrame frame;
  frame.timestamp = timestamp;
  frame.samples_db.reserve(plan.num_channels);
  for (double w : receiver_channel_watts(plan, gains, noise, scene))
    frame.samples_db.push_back(watts_to_dbm(w));
  return frame;
}

}  // namespace hidjam
