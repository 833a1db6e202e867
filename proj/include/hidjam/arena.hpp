#pragma once

// Discrete-time user-vs-jammer game.
//
// Every decision slot the user commits a channel, the band is sensed once per sense
// sub-slot (receiver frames for the user, per-channel sensed SINR for the jammer),
// then both sides learn. The jammer's channel for slot t was fixed at the end of
// slot t-1, so it can only react to what it sensed up to t-1.

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hidjam/dqn/network.hpp"
#include "hidjam/dqn/trainer.hpp"
#include "hidjam/hiding_metric.hpp"
#include "hidjam/jammers.hpp"
#include "hidjam/spectrum.hpp"
#include "hidjam/state_matrix.hpp"
#include "hidjam/types.hpp"
#include "hidjam/user_policies.hpp"

namespace hidjam {

enum class JammerKind { none, follower, qlearning };

inline constexpr std::array<JammerKind, 2> kTableJammers{JammerKind::follower, JammerKind::qlearning};

inline std::string_view to_string(JammerKind k) {
  switch (k) {
    case JammerKind::none: return "none";
    case JammerKind::follower: return "follower";
    case JammerKind::qlearning: return "qlearning";
  }
  return "?";
}

inline std::optional<JammerKind> parse_jammer(std::string_view s) {
  for (auto k : {JammerKind::none, JammerKind::follower, JammerKind::qlearning})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

struct ScenarioConfig {
  std::string name = "default";

  ChannelPlan plan{};
  LinkGains gains{};
  NoiseModel noise{};

  EmitterSpec user_emitter{30.0, 0.5, EmitterRole::user};
  EmitterSpec jammer_emitter{40.0, 0.5, EmitterRole::jammer};
  EmitterSpec env_emitter{20.0, 0.5, EmitterRole::environment};
  std::vector<Channel> env_channels{8};
  std::int64_t env_hop_interval = 0;  // 0 keeps the interferer static

  JammerKind jammer = JammerKind::follower;
  DetectionModel detection{};
  bool self_jamming = false;
  QJammerParams qjammer{};

  PolicyKind policy = PolicyKind::adrlh;
  int fhss_period = 10;
  std::vector<Channel> fhss_pattern;  // overrides the generated pattern when non-empty
  AfhParams afh{};
  RewardParams reward{};
  double jammer_estimate_margin_db = 6.0;

  dqn::TrainConfig dqn{};
  std::optional<dqn::Architecture> architecture;  // defaults to Architecture::waterfall
  NormalizationRange normalization{};
  int history_frames = 100;

  std::int64_t decision_slots = 10000;
  int sense_subslots = 10;
  std::uint64_t seed = 1;

  dqn::Architecture network_architecture() const {
    return architecture ? *architecture : dqn::Architecture::waterfall(history_frames, plan.num_channels);
  }

  // Throws ConfigError naming the offending field.
  void validate() const {
    auto check = [](bool ok, const char* field, const char* what) {
      if (!ok) throw ConfigError(field, what);
    };
    try {
      plan.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("plan", e.what());
    }
    for (const auto* e : {&user_emitter, &jammer_emitter, &env_emitter}) {
      try {
        e->validate();
      } catch (const std::invalid_argument& ex) {
        throw ConfigError(e == &user_emitter ? "user" : e == &jammer_emitter ? "jammer" : "environment", ex.what());
      }
    }
    for (Channel c : env_channels) check(plan.contains(c), "environment.channels", "channel outside the band");
    check(env_hop_interval >= 0, "environment.hop_interval", "must be non-negative");
    check(qjammer.learning_rate > 0.0 && qjammer.learning_rate <= 1.0, "jammer.q.learning_rate", "must lie in (0, 1]");
    check(qjammer.discount >= 0.0 && qjammer.discount < 1.0, "jammer.q.discount", "must lie in [0, 1)");
    check(fhss_period >= 1, "user.fhss.period", "must be positive");
    for (Channel c : fhss_pattern) check(plan.contains(c), "user.fhss.pattern", "channel outside the band");
    check(afh.cooldown_slots >= 0, "user.afh.cooldown", "must be non-negative");
    check(reward.alpha >= 0.0, "reward.alpha", "must be non-negative");
    try {
      reward.correlation.validate();
    } catch (const std::domain_error& e) {
      throw ConfigError("reward", e.what());
    }
    try {
      dqn.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("dqn", e.what());
    }
    normalization.validate();
    check(history_frames >= 1, "dqn.history_frames", "must be positive");
    if (is_learning(policy)) {
      try {
        const auto plans = dqn::plan_layers(network_architecture());
        const auto& arch = network_architecture();
        check(arch.input == dqn::Shape3{1, history_frames, plan.num_channels}, "dqn.layers",
              "input shape must be 1 x history_frames x channels");
        check(!plans.empty() && plans.back().out.size() == plan.num_channels, "dqn.layers",
              "network must end with one output per channel");
      } catch (const std::invalid_argument& e) {
        throw ConfigError("dqn.layers", e.what());
      }
    }
    check(decision_slots >= 1, "slots", "must be positive");
    check(sense_subslots >= 1, "timing.sense_subslots", "must be positive");
  }
};

struct SlotLog {
  std::int64_t slot = 0;
  Channel user_channel = kNone;
  Channel jammer_channel = kNone;
  Channel detection = kNone;          // jammer's sensing result
  Channel observed_jammer = kNone;    // user's estimate of the jammer's channel
  double sinr = 0.0;
  double reward = 0.0;
  double correlation = 0.0;
  bool jammed = false;
  bool training_active = false;
};

class Arena {
 public:
  explicit Arena(ScenarioConfig config)
      : cfg_((config.validate(), std::move(config))),
        rng_(cfg_.seed),
        user_history_(cfg_.reward.correlation.history_capacity()),
        observed_jammer_history_(cfg_.reward.correlation.history_capacity()),
        env_channels_(cfg_.env_channels) {
    const int n = cfg_.plan.num_channels;
    switch (cfg_.policy) {
      case PolicyKind::fhss: {
        auto pattern = cfg_.fhss_pattern.empty()
                           ? FhssHopper::make_pattern(n, cfg_.fhss_period, cfg_.seed ^ 0x9E3779B97F4A7C15ULL)
                           : cfg_.fhss_pattern;
        fhss_.emplace(std::move(pattern));
        break;
      }
      case PolicyKind::afh:
        afh_.emplace(n, cfg_.afh, uniform_channel(n, rng_));
        break;
      case PolicyKind::adrla:
      case PolicyKind::adrlh:
        drl_ = std::make_unique<DrlUser<float>>(cfg_.policy, cfg_.network_architecture(), cfg_.dqn, cfg_.reward,
                                                rng_);
        break;
    }
    switch (cfg_.jammer) {
      case JammerKind::none:
        break;
      case JammerKind::follower:
        next_jam_ = follower_.decide(kNone, n, rng_);
        break;
      case JammerKind::qlearning:
        qjammer_.emplace(n, cfg_.qjammer);
        next_jam_ = qjammer_->choose(kNone, cfg_.qjammer.epsilon.at(0), rng_);
        break;
    }
  }

  const ScenarioConfig& config() const { return cfg_; }
  std::int64_t slots_done() const { return slot_; }
  const DrlUser<float>* drl_user() const { return drl_.get(); }
  const QLearningJammer* qjammer() const { return qjammer_ ? &*qjammer_ : nullptr; }
  const std::vector<Channel>& environment_channels() const { return env_channels_; }

  StateMatrix current_state() const {
    return assemble_state(frames_, cfg_.history_frames, cfg_.plan.num_channels, cfg_.normalization);
  }

  SlotLog step() {
    const int n = cfg_.plan.num_channels;
    ++slot_;
    if (cfg_.env_hop_interval > 0 && slot_ > 1 && (slot_ - 1) % cfg_.env_hop_interval == 0)
      for (auto& c : env_channels_) c = uniform_channel(n, rng_);

    // (a) user commits its channel from information up to the previous slot
    const Channel jam = next_jam_;
    std::optional<StateMatrix> state;
    Channel action = kNone;
    switch (cfg_.policy) {
      case PolicyKind::fhss:
        action = fhss_->decide();
        break;
      case PolicyKind::afh:
        action = last_interference_ ? afh_->decide(*last_interference_) : afh_->current();
        break;
      default:
        state = current_state();
        action = drl_->act(*state, rng_);
        break;
    }

    Scene scene;
    scene.user = Transmission{action, cfg_.user_emitter};
    if (jam != kNone) scene.jammer = Transmission{jam, cfg_.jammer_emitter};
    for (Channel c : env_channels_) scene.environment.push_back({c, cfg_.env_emitter});

    // (b) sense sub-slots
    std::vector<double> sensed_sum(n, 0.0);
    std::vector<double> received_sum(n, 0.0);
    for (int k = 0; k < cfg_.sense_subslots; ++k) {
      const auto watts = receiver_channel_watts(cfg_.plan, cfg_.gains, cfg_.noise, scene);
      SpectrumFrame frame;
      frame.timestamp = (slot_ - 1) * cfg_.sense_subslots + k;
      frame.samples_db.reserve(n);
      for (double w : watts) frame.samples_db.push_back(watts_to_dbm(w));
      push_frame(std::move(frame));
      const auto sensed = jammer_sensed_sinr(cfg_.plan, cfg_.gains, cfg_.noise, scene, cfg_.self_jamming);
      for (int i = 0; i < n; ++i) {
        sensed_sum[i] += sensed[i];
        received_sum[i] += watts[i];
      }
    }
    for (int i = 0; i < n; ++i) {
      sensed_sum[i] /= cfg_.sense_subslots;
      received_sum[i] /= cfg_.sense_subslots;
    }
    const Channel detection = detect_user_channel(sensed_sum, cfg_.detection);

    // (d) user side: SINR, inferred jammer channel, correlation, reward, learning
    SlotLog log;
    log.slot = slot_;
    log.user_channel = action;
    log.jammer_channel = jam;
    log.detection = detection;
    log.sinr = user_sinr(cfg_.plan, cfg_.gains, cfg_.noise, scene);
    log.jammed = jam != kNone && jam == action;

    std::vector<double> own(n);
    for (Channel c = 1; c <= n; ++c) own[c - 1] = received_in_channel(*scene.user, cfg_.gains.tr_db, c, cfg_.plan);
    const double noise_w = cfg_.noise.channel_watts(cfg_.plan);
    auto interference = interference_frame(received_sum, own, noise_w, slot_);
    log.observed_jammer = estimate_jammer_channel(interference, watts_to_dbm(noise_w), cfg_.jammer_estimate_margin_db);
    user_history_.push(action);
    observed_jammer_history_.push(log.observed_jammer);

    if (drl_) {
      const auto outcome = drl_->finish_slot(log.sinr, user_history_, observed_jammer_history_, current_state(), rng_);
      log.reward = outcome.reward;
      log.correlation = outcome.correlation;
      log.training_active = drl_->training_active();
    } else {
      log.correlation = history_correlation(user_history_, observed_jammer_history_, cfg_.reward.correlation);
      log.reward = reward_adrla(log.sinr);
    }
    last_interference_ = std::move(interference);

    // jammer learns from this slot and fixes its channel for the next one
    switch (cfg_.jammer) {
      case JammerKind::none:
        break;
      case JammerKind::follower:
        next_jam_ = follower_.decide(detection, n, rng_);
        break;
      case JammerKind::qlearning: {
        const double r = (detection != kNone && detection == jam) ? 1.0 : 0.0;
        next_jam_ = qjammer_->step(jammer_key_, jam, r, detection, rng_);
        jammer_key_ = detection;
        if (qjammer_->updates() % 1000 == 0 && !qjammer_->all_finite())
          throw std::runtime_error("Q-learning jammer table diverged");
        break;
      }
    }
    return log;
  }

 private:
  void push_frame(SpectrumFrame f) {
    frames_.push_back(std::move(f));
    while (frames_.size() > static_cast<std::size_t>(cfg_.history_frames)) frames_.pop_front();
  }

  ScenarioConfig cfg_;
  Rng rng_;
  std::int64_t slot_ = 0;
  std::deque<SpectrumFrame> frames_;
  ActionHistory user_history_;
  ActionHistory observed_jammer_history_;
  std::vector<Channel> env_channels_;
  std::optional<SpectrumFrame> last_interference_;

  std::optional<FhssHopper> fhss_;
  std::optional<AfhHopper> afh_;
  std::unique_ptr<DrlUser<float>> drl_;

  FollowerJammer follower_;
  std::optional<QLearningJammer> qjammer_;
  Channel next_jam_ = kNone;
  Channel jammer_key_ = kNone;
};

inline std::vector<SlotLog> run(const ScenarioConfig& config) {
  Arena arena(config);
  std::vector<SlotLog> logs;
  logs.reserve(static_cast<std::size_t>(config.decision_slots));
  for (std::int64_t t = 0; t < config.decision_slots; ++t) logs.push_back(arena.step());
  return logs;
}

}  // namespace hidjam
