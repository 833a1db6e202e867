#pragma once

// Per-window and converged-regime metrics over a run's slot logs. The harness may
// read both sides of the game, so sensing probability uses ground truth.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "hidjam/arena.hpp"

namespace hidjam {

namespace detail {
inline void require_nonempty(std::span<const SlotLog> logs, const char* what) {
  if (logs.empty()) throw std::invalid_argument(std::string(what) + ": empty window");
}
}  // namespace detail

// Share of slots in which the jammer detected the user's true channel.
inline double sensing_probability(std::span<const SlotLog> logs) {
  detail::require_nonempty(logs, "sensing_probability");
  std::size_t hits = 0;
  for (const auto& l : logs) hits += (l.detection != kNone && l.detection == l.user_channel);
  return static_cast<double>(hits) / static_cast<double>(logs.size());
}

inline double jammed_fraction(std::span<const SlotLog> logs) {
  detail::require_nonempty(logs, "jammed_fraction");
  std::size_t hits = 0;
  for (const auto& l : logs) hits += l.jammed;
  return static_cast<double>(hits) / static_cast<double>(logs.size());
}

inline double action_correlation(std::span<const SlotLog> logs) {
  detail::require_nonempty(logs, "action_correlation");
  double sum = 0.0;
  for (const auto& l : logs) sum += l.correlation;
  return sum / static_cast<double>(logs.size());
}

// Best achievable SINR: no jammer, no environment interference, best channel.
inline double clean_sinr(const ScenarioConfig& cfg) {
  double best = 0.0;
  for (Channel c = 1; c <= cfg.plan.num_channels; ++c) {
    Scene s;
    s.user = Transmission{c, cfg.user_emitter};
    best = std::max(best, user_sinr(cfg.plan, cfg.gains, cfg.noise, s));
  }
  return best;
}

// Mean of log2(1 + sinr) / log2(1 + max_sinr), clipped to [0, 1].
inline double normalized_throughput(std::span<const SlotLog> logs, double max_sinr) {
  detail::require_nonempty(logs, "normalized_throughput");
  const double denom = std::log2(1.0 + max_sinr);
  if (!(denom > 0.0)) throw std::invalid_argument("normalized_throughput: reference SINR must be positive");
  double sum = 0.0;
  for (const auto& l : logs) sum += std::log2(1.0 + l.sinr) / denom;
  return std::clamp(sum / static_cast<double>(logs.size()), 0.0, 1.0);
}

// The final 20% of a run (rounded up), taken as the converged regime.
inline std::span<const SlotLog> converged_tail(std::span<const SlotLog> logs) {
  detail::require_nonempty(logs, "converged_tail");
  const std::size_t tail = (logs.size() + 4) / 5;
  return logs.subspan(logs.size() - tail);
}

inline double jammed_probability(std::span<const SlotLog> logs) { return jammed_fraction(converged_tail(logs)); }

struct MetricsRow {
  std::size_t window = 0;
  double sensing_probability = 0.0;
  double mean_correlation = 0.0;
  double normalized_throughput = 0.0;
  double jammed_probability = 0.0;
};

// Consecutive windows of `window` slots; a trailing partial window is kept.
inline std::vector<MetricsRow> windowed_metrics(std::span<const SlotLog> logs, std::size_t window, double max_sinr) {
  if (window == 0) throw std::invalid_argument("windowed_metrics: window must be positive");
  std::vector<MetricsRow> rows;
  for (std::size_t begin = 0, w = 0; begin < logs.size(); begin += window, ++w) {
    const auto part = logs.subspan(begin, std::min(window, logs.size() - begin));
    rows.push_back({w, sensing_probability(part), action_correlation(part), normalized_throughput(part, max_sinr),
                    jammed_fraction(part)});
  }
  return rows;
}

// Converged-regime summary of one run.
struct RunSummary {
  double jammed_probability = 0.0;
  double sensing_probability = 0.0;
  double mean_correlation = 0.0;
  double normalized_throughput = 0.0;
};

inline RunSummary summarize_run(std::span<const SlotLog> logs, double max_sinr) {
  const auto tail = converged_tail(logs);
  return {jammed_fraction(tail), sensing_probability(tail), action_correlation(tail),
          normalized_throughput(tail, max_sinr)};
}

}  // namespace hidjam
