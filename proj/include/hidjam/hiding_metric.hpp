#pragma once

// Lag correlation between the user's and the jammer's channel sequences.
//
// For a lag m the element-wise offsets Z_i = x[i] - y[i+m] are collected over a
// window; the distance bias K is the modal offset and rho(m) is the share of pairs
// whose offset equals K. A reactive jammer that copies the user with delay d makes
// rho(d) = 1, while a jammer that senses nothing produces low values at every lag.

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hidjam/types.hpp"

namespace hidjam {

inline constexpr int kNoBias = std::numeric_limits<int>::min();

// Fixed-capacity ring of channel indices. Slots that were never written read as kNone.
class ActionHistory {
 public:
  explicit ActionHistory(std::size_t capacity) : ring_(capacity, kNone) {
    if (capacity == 0) throw std::invalid_argument("ActionHistory: capacity must be positive");
  }

  void push(Channel c) {
    ring_[head_] = c;
    head_ = (head_ + 1) % ring_.size();
    filled_ = std::min(filled_ + 1, ring_.size());
  }

  std::size_t capacity() const { return ring_.size(); }
  std::size_t size() const { return filled_; }

  Channel latest() const { return filled_ == 0 ? kNone : ring_[(head_ + ring_.size() - 1) % ring_.size()]; }

  // Oldest first, always capacity() long; the newest entry is last.
  std::vector<Channel> chronological() const {
    std::vector<Channel> out(ring_.size());
    for (std::size_t i = 0; i < ring_.size(); ++i) out[i] = ring_[(head_ + i) % ring_.size()];
    return out;
  }

 private:
  std::vector<Channel> ring_;
  std::size_t head_ = 0;
  std::size_t filled_ = 0;
};

struct LagRange {
  int min_lag = 0;
  int max_lag = 5;

  void validate(std::size_t window) const {
    if (min_lag > max_lag) throw std::domain_error("lag range is empty");
    const int bound = static_cast<int>(window) - 1;
    if (std::abs(min_lag) > bound || std::abs(max_lag) > bound)
      throw std::domain_error("lag range exceeds +/-(window - 1) = " + std::to_string(bound));
  }
};

// Positions [begin, begin + length) of x take part; y is indexed on the same time axis.
struct CorrelationWindow {
  std::size_t begin = 0;
  std::size_t length = 0;
};

namespace detail {

// Calls f(offset) for every window pair where both sides are real channels and
// returns the number of window positions.
template <typename F>
std::size_t for_each_offset(std::span<const Channel> x, std::span<const Channel> y, int lag,
                            CorrelationWindow w, F&& f) {
  if (w.begin + w.length > x.size()) throw std::out_of_range("correlation window exceeds sequence");
  for (std::size_t i = w.begin; i < w.begin + w.length; ++i) {
    const auto j = static_cast<std::ptrdiff_t>(i) + lag;
    if (j < 0 || j >= static_cast<std::ptrdiff_t>(y.size())) continue;
    const Channel a = x[i];
    const Channel b = y[static_cast<std::size_t>(j)];
    if (a == kNone || b == kNone) continue;
    f(a - b);
  }
  return w.length;
}

}  // namespace detail

// Modal offset x[i] - y[i+lag]; ties go to the smallest |K|, then the smallest K.
// kNoBias when no pair is free of kNone.
inline int distance_bias(std::span<const Channel> x, std::span<const Channel> y, int lag,
                         CorrelationWindow w) {
  std::map<int, std::size_t> counts;
  detail::for_each_offset(x, y, lag, w, [&](int z) { ++counts[z]; });
  int best = kNoBias;
  std::size_t best_count = 0;
  for (const auto& [z, count] : counts) {
    const bool better = count > best_count ||
                        (count == best_count && (std::abs(z) < std::abs(best) ||
                                                 (std::abs(z) == std::abs(best) && z < best)));
    if (better) {
      best = z;
      best_count = count;
    }
  }
  return best;
}

inline int distance_bias(std::span<const Channel> x, std::span<const Channel> y, int lag) {
  return distance_bias(x, y, lag, {0, x.size()});
}

inline double rho(std::span<const Channel> x, std::span<const Channel> y, int lag, CorrelationWindow w) {
  if (w.length == 0) return 0.0;
  const int bias = distance_bias(x, y, lag, w);
  if (bias == kNoBias) return 0.0;
  std::size_t matches = 0;
  detail::for_each_offset(x, y, lag, w, [&](int z) { matches += (z == bias); });
  return static_cast<double>(matches) / static_cast<double>(w.length);
}

inline double rho(std::span<const Channel> x, std::span<const Channel> y, int lag) {
  return rho(x, y, lag, {0, x.size()});
}

inline double max_correlation(std::span<const Channel> x, std::span<const Channel> y, LagRange range,
                              CorrelationWindow w) {
  if (range.min_lag > range.max_lag) throw std::domain_error("max_correlation: empty lag range");
  double best = 0.0;
  for (int m = range.min_lag; m <= range.max_lag; ++m) best = std::max(best, rho(x, y, m, w));
  return best;
}

inline double max_correlation(std::span<const Channel> x, std::span<const Channel> y, LagRange range) {
  return max_correlation(x, y, range, {0, x.size()});
}

// Settings for the in-loop correlation R between two action histories.
struct CorrelationConfig {
  std::size_t window = 10;  // decision slots
  LagRange lags{};

  // Histories need `window` slots plus room for every shifted index.
  std::size_t history_capacity() const {
    return window + static_cast<std::size_t>(std::max(lags.max_lag, 0)) +
           static_cast<std::size_t>(std::max(-lags.min_lag, 0));
  }

  void validate() const {
    if (window == 0) throw std::domain_error("correlation window must be positive");
    lags.validate(window);
  }
};

// R over the most recent `window` user slots whose lagged jammer partners have all
// been observed, i.e. the user window ends max_lag slots before the newest entry.
inline double history_correlation(const ActionHistory& user, const ActionHistory& jammer,
                                  const CorrelationConfig& cfg) {
  const std::size_t cap = cfg.history_capacity();
  if (user.capacity() != cap || jammer.capacity() != cap)
    throw std::invalid_argument("history_correlation: history capacity does not match config");
  const auto x = user.chronological();
  const auto y = jammer.chronological();
  const std::size_t begin = cap - cfg.window - static_cast<std::size_t>(std::max(cfg.lags.max_lag, 0));
  return max_correlation(x, y, cfg.lags, {begin, cfg.window});
}

}  // namespace hidjam
