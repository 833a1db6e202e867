#pragma once

// Sense -> learn -> act jammers. Both jammers work only from their own sensor: the
// detected user channel per decision slot (or kNone when the user is not visible).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "hidjam/spectrum.hpp"
#include "hidjam/types.hpp"

namespace hidjam {

struct DetectionModel {
  double threshold_db = 0.0;
};

// Strongest sensed channel if it clears the threshold; lowest index wins ties.
inline Channel detect_user_channel(std::span<const double> sensed, const DetectionModel& model) {
  if (sensed.empty()) return kNone;
  const auto it = std::max_element(sensed.begin(), sensed.end());
  if (!(*it > 0.0)) return kNone;
  if (linear_to_db(*it) < model.threshold_db) return kNone;
  return static_cast<Channel>(it - sensed.begin()) + 1;
}

// Reactive jammer: jams whatever it detected in the previous decision slot.
struct FollowerJammer {
  Channel last_detection = kNone;

  // `detection` is the most recent sensing result (slot t-1 when choosing for slot t).
  Channel decide(Channel detection, int num_channels, Rng& rng) {
    last_detection = detection;
    if (last_detection != kNone) return last_detection;
    return uniform_channel(num_channels, rng);
  }
};

struct LinearEpsilon {
  double start = 0.3;
  double end = 0.02;
  std::int64_t decay_slots = 2000;

  double at(std::int64_t slot) const {
    if (decay_slots <= 0 || slot >= decay_slots) return end;
    const double frac = static_cast<double>(slot) / static_cast<double>(decay_slots);
    return start + (end - start) * frac;
  }
};

struct QJammerParams {
  double learning_rate = 0.1;
  double discount = 0.8;
  LinearEpsilon epsilon{0.3, 0.02, 2000};
};

// Tabular Q-learning jammer. State key = previously detected user channel (0 for
// none), action = channel to jam. Reward 1 when the jammed channel is where it then
// detects the user.
class QLearningJammer {
 public:
  QLearningJammer(int num_channels, QJammerParams params)
      : num_channels_(num_channels),
        params_(params),
        table_(static_cast<std::size_t>(num_channels + 1) * num_channels, 0.0) {
    if (num_channels < 1) throw std::invalid_argument("QLearningJammer: need at least one channel");
    if (!(params.learning_rate > 0.0 && params.learning_rate <= 1.0))
      throw std::invalid_argument("QLearningJammer: learning_rate must lie in (0, 1]");
    if (!(params.discount >= 0.0 && params.discount < 1.0))
      throw std::invalid_argument("QLearningJammer: discount must lie in [0, 1)");
  }

  int num_channels() const { return num_channels_; }
  const QJammerParams& params() const { return params_; }
  std::int64_t updates() const { return updates_; }

  double q(Channel state_key, Channel action) const { return table_[index(state_key, action)]; }
  double& q(Channel state_key, Channel action) { return table_[index(state_key, action)]; }

  std::span<const double> row(Channel state_key) const {
    return {table_.data() + index(state_key, 1), static_cast<std::size_t>(num_channels_)};
  }

  void update(Channel prev_key, Channel prev_action, double reward, Channel new_key) {
    const auto next = row(new_key);
    const double best_next = *std::max_element(next.begin(), next.end());
    double& cell = q(prev_key, prev_action);
    cell += params_.learning_rate * (reward + params_.discount * best_next - cell);
    ++updates_;
  }

  Channel greedy(Channel state_key) const {
    const auto r = row(state_key);
    return static_cast<Channel>(std::max_element(r.begin(), r.end()) - r.begin()) + 1;
  }

  // Exploits with a uniform pick among tied maxima, so unvisited states explore too.
  Channel choose(Channel state_key, double epsilon, Rng& rng) const {
    if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < epsilon)
      return uniform_channel(num_channels_, rng);
    const auto r = row(state_key);
    const double best = *std::max_element(r.begin(), r.end());
    const auto ties = std::count(r.begin(), r.end(), best);
    if (ties == 1) return greedy(state_key);
    auto k = std::uniform_int_distribution<std::ptrdiff_t>(0, ties - 1)(rng);
    for (int i = 0; i < num_channels_; ++i)
      if (r[i] == best && k-- == 0) return i + 1;
    return greedy(state_key);
  }

  // One learning step followed by the epsilon-greedy choice for the next slot.
  Channel step(Channel prev_key, Channel prev_action, double reward, Channel new_key, Rng& rng) {
    update(prev_key, prev_action, reward, new_key);
    return choose(new_key, params_.epsilon.at(updates_), rng);
  }

  bool all_finite() const {
    return std::all_of(table_.begin(), table_.end(), [](double v) { return std::isfinite(v); });
  }

 private:
  std::size_t index(Channel state_key, Channel action) const {
    if (state_key < 0 || state_key > num_channels_ || action < 1 || action > num_channels_)
      throw std::domain_error("QLearningJammer: key or action out of range");
    return static_cast<std::size_t>(state_key) * num_channels_ + (action - 1);
  }

  int num_channels_;
  QJammerParams params_;
  std::vector<double> table_;
  std::int64_t updates_ = 0;
};

}  // namespace hidjam
