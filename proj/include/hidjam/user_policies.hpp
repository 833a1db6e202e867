#pragma once

// The four user strategies: a fixed periodic hopper (FHSS), an adaptive hopper that
// leaves a channel once it looks jammed (AFH), and two deep Q-learning users that
// differ only in their reward: throughput alone (ADRLA) or throughput plus a bonus
// for a low action correlation with the jammer (ADRLH).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hidjam/dqn/network.hpp"
#include "hidjam/dqn/replay.hpp"
#include "hidjam/dqn/trainer.hpp"
#include "hidjam/hiding_metric.hpp"
#include "hidjam/spectrum.hpp"
#include "hidjam/state_matrix.hpp"
#include "hidjam/types.hpp"

namespace hidjam {

enum class PolicyKind { fhss, afh, adrla, adrlh };

inline constexpr std::array<PolicyKind, 4> kAllPolicies{PolicyKind::afh, PolicyKind::fhss, PolicyKind::adrla,
                                                        PolicyKind::adrlh};

inline std::string_view to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::fhss: return "FHSS";
    case PolicyKind::afh: return "AFH";
    case PolicyKind::adrla: return "ADRLA";
    case PolicyKind::adrlh: return "ADRLH";
  }
  return "?";
}

inline std::optional<PolicyKind> parse_policy(std::string_view s) {
  for (auto k : kAllPolicies)
    if (to_string(k) == s) return k;
  return std::nullopt;
}

inline bool is_learning(PolicyKind k) { return k == PolicyKind::adrla || k == PolicyKind::adrlh; }

struct RewardParams {
  double alpha = 2.0;
  CorrelationConfig correlation{};

  void validate() const {
    if (!(alpha >= 0.0)) throw std::invalid_argument("reward: alpha must be non-negative");
    correlation.validate();
  }
};

inline double reward_adrla(double sinr) { return std::log2(1.0 + sinr); }

inline double reward_adrlh(double sinr, double correlation, const RewardParams& params) {
  return std::log2(1.0 + sinr) + params.alpha * (1.0 - correlation);
}

// --- FHSS -----------------------------------------------------------------

class FhssHopper {
 public:
  explicit FhssHopper(std::vector<Channel> pattern) : pattern_(std::move(pattern)) {
    if (pattern_.empty()) throw std::invalid_argument("FhssHopper: empty pattern");
  }

  // Seeded period-P pattern, uniform over sequences whose number of cyclic
  // self-transitions equals round(P / N), the rate of a memoryless uniform hopper.
  static std::vector<Channel> make_pattern(int num_channels, int period, std::uint64_t seed) {
    if (num_channels < 1 || period < 1) throw std::invalid_argument("FhssHopper: bad pattern shape");
    Rng rng(seed);
    std::vector<Channel> p(static_cast<std::size_t>(period));
    if (period == 1) {
      p[0] = uniform_channel(num_channels, rng);
      return p;
    }
    const int target = static_cast<int>(std::lround(static_cast<double>(period) / num_channels));
    std::vector<Channel> best;
    int best_gap = period + 1;
    for (int attempt = 0; attempt < 100000 && best_gap != 0; ++attempt) {
      for (auto& c : p) c = uniform_channel(num_channels, rng);
      int dwells = 0;
      for (int i = 0; i < period; ++i) dwells += p[i] == p[(i + period - 1) % period];
      if (std::abs(dwells - target) < best_gap) {
        best_gap = std::abs(dwells - target);
        best = p;
      }
    }
    return best;
  }

  Channel decide() {
    const Channel c = pattern_[position_];
    position_ = (position_ + 1) % pattern_.size();
    return c;
  }

  const std::vector<Channel>& pattern() const { return pattern_; }
  std::size_t position() const { return position_; }

 private:
  std::vector<Channel> pattern_;
  std::size_t position_ = 0;
};

// --- AFH ------------------------------------------------------------------

struct AfhParams {
  double margin_db = 6.0;
  int cooldown_slots = 20;
};

// Stays put until the current channel stands out from the channel median by the
// margin, then moves to the quietest channel not on cooldown.
class AfhHopper {
 public:
  AfhHopper(int num_channels, AfhParams params, Channel initial)
      : params_(params), current_(initial), cooldown_(static_cast<std::size_t>(num_channels), 0) {
    if (num_channels < 1) throw std::invalid_argument("AfhHopper: need at least one channel");
    if (initial < 1 || initial > num_channels) throw std::invalid_argument("AfhHopper: initial channel out of range");
  }

  Channel current() const { return current_; }
  int cooldown(Channel c) const { return cooldown_.at(static_cast<std::size_t>(c - 1)); }

  // `frame` should hold interference only (the user's own emission removed).
  Channel decide(const SpectrumFrame& frame) {
    const auto& s = frame.samples_db;
    if (s.size() != cooldown_.size()) throw std::invalid_argument("AfhHopper: frame width mismatch");
    for (auto& c : cooldown_) c = std::max(0, c - 1);
    if (s[current_ - 1] <= median(s) + params_.margin_db) return current_;

    const Channel old = current_;
    Channel pick = quietest(s, old, true);
    if (pick == kNone) pick = quietest(s, old, false);
    if (pick == kNone) pick = old;
    cooldown_[old - 1] = params_.cooldown_slots;
    current_ = pick;
    return current_;
  }

 private:
  static double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  }

  Channel quietest(const std::vector<double>& s, Channel exclude, bool respect_cooldown) const {
    Channel best = kNone;
    for (Channel c = 1; c <= static_cast<Channel>(s.size()); ++c) {
      if (c == exclude || (respect_cooldown && cooldown_[c - 1] > 0)) continue;
      if (best == kNone || s[c - 1] < s[best - 1]) best = c;
    }
    return best;
  }

  AfhParams params_;
  Channel current_;
  std::vector<int> cooldown_;
};

// --- what the user can infer about the jammer --------------------------------

// Received power with the user's own expected contribution removed, in dBm.
inline SpectrumFrame interference_frame(std::span<const double> received_watts, std::span<const double> own_watts,
                                        double floor_watts, std::int64_t timestamp) {
  SpectrumFrame f;
  f.timestamp = timestamp;
  f.samples_db.reserve(received_watts.size());
  for (std::size_t i = 0; i < received_watts.size(); ++i)
    f.samples_db.push_back(watts_to_dbm(std::max(received_watts[i] - own_watts[i], floor_watts)));
  return f;
}

// Channel of the strongest residual peak, or kNone when it does not clear the
// noise floor by `margin_db`.
inline Channel estimate_jammer_channel(const SpectrumFrame& interference, double noise_floor_dbm,
                                       double margin_db = 6.0) {
  const auto& s = interference.samples_db;
  if (s.empty()) return kNone;
  const auto it = std::max_element(s.begin(), s.end());
  if (*it < noise_floor_dbm + margin_db) return kNone;
  return static_cast<Channel>(it - s.begin()) + 1;
}

// --- deep Q-learning users -----------------------------------------------

struct SlotOutcome {
  double reward = 0.0;
  double correlation = 0.0;
  bool trained = false;
  double loss = 0.0;
};

// One ADRLA/ADRLH agent: Q network, replay memory, exploration schedule and stop rule.
// act() picks a_t from S_t; finish_slot() closes the slot with the observed SINR,
// stores (S_t, a_t, r_t, S_{t+1}) and trains while training is active.
template <typename Scalar = float>
class DrlUser {
 public:
  DrlUser(PolicyKind kind, dqn::Architecture arch, dqn::TrainConfig config, RewardParams reward, Rng& init_rng)
      : kind_(kind),
        config_(config),
        reward_(reward),
        net_(std::move(arch)),
        target_(net_),
        replay_(config.replay_capacity),
        monitor_(config.loss_threshold, config.loss_window) {
    if (!is_learning(kind)) throw std::invalid_argument("DrlUser: policy kind is not a learning policy");
    config_.validate();
    reward_.validate();
    net_.init_uniform(init_rng);
    target_ = net_;
  }

  PolicyKind kind() const { return kind_; }
  bool training_active() const { return monitor_.active(); }
  std::int64_t decisions() const { return decisions_; }
  std::size_t train_steps() const { return train_steps_; }
  const dqn::QNetwork<Scalar>& network() const { return net_; }
  dqn::QNetwork<Scalar>& network() { return net_; }
  const dqn::ReplayBuffer& replay() const { return replay_; }
  const dqn::TrainingMonitor& monitor() const { return monitor_; }

  double epsilon() const { return monitor_.active() ? config_.epsilon.at(decisions_) : 0.0; }

  Channel act(const StateMatrix& state, Rng& rng) {
    const auto q = dqn::q_forward(net_, state);
    const Channel a = dqn::select_action<Scalar>(q, epsilon(), rng);
    pending_state_ = state;
    pending_action_ = a;
    ++decisions_;
    return a;
  }

  double reward_for(double sinr, double correlation) const {
    return kind_ == PolicyKind::adrlh ? reward_adrlh(sinr, correlation, reward_) : reward_adrla(sinr);
  }

  // `own` and `jammer_observed` are the user's action history and its own estimate of
  // the jammer's actions; ground truth about the jammer never reaches the agent.
  SlotOutcome finish_slot(double sinr, const ActionHistory& own, const ActionHistory& jammer_observed,
                          StateMatrix next_state, Rng& rng) {
    if (pending_action_ == kNone) throw std::logic_error("DrlUser: finish_slot without act");
    SlotOutcome out;
    out.correlation = history_correlation(own, jammer_observed, reward_.correlation);
    out.reward = reward_for(sinr, out.correlation);
    replay_.push({std::move(pending_state_), pending_action_, out.reward, std::move(next_state)});
    pending_action_ = kNone;

    if (monitor_.active() && replay_.size() >= config_.train_start_size) {
      const bool lagged = config_.target_sync_interval > 1;
      if (lagged && train_steps_ % config_.target_sync_interval == 0) target_ = net_;
      const auto result = dqn::train_step(net_, lagged ? target_ : net_, replay_, config_, rng);
      ++train_steps_;
      out.trained = result.trained;
      out.loss = result.loss;
      monitor_.observe(result.loss);
    }
    return out;
  }

 private:
  PolicyKind kind_;
  dqn::TrainConfig config_;
  RewardParams reward_;
  dqn::QNetwork<Scalar> net_;
  dqn::QNetwork<Scalar> target_;
  dqn::ReplayBuffer replay_;
  dqn::TrainingMonitor monitor_;
  StateMatrix pending_state_;
  Channel pending_action_ = kNone;
  std::int64_t decisions_ = 0;
  std::size_t train_steps_ = 0;
};

}  // namespace hidjam
