#pragma once

// Batch runner: expands an ExperimentSpec into (policy, jammer, seed) runs, executes
// them on a small thread pool, and writes per-window CSVs plus summary tables.
// Output order depends only on the spec, never on thread timing.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "hidjam/arena.hpp"
#include "hidjam/config.hpp"
#include "hidjam/metrics.hpp"

namespace hidjam {

inline std::string format_g6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct RunKey {
  PolicyKind policy;
  JammerKind jammer;
  std::uint64_t seed;
};

struct RunResult {
  RunKey key;
  std::string scenario;
  std::vector<MetricsRow> windows;
  RunSummary summary;
};

struct CellSummary {
  PolicyKind policy;
  JammerKind jammer;
  std::size_t seeds = 0;
  double jammed_mean = 0.0;
  double jammed_std = 0.0;
  double sensing_mean = 0.0;
  double correlation_mean = 0.0;
  double throughput_mean = 0.0;
};

struct ExperimentResult {
  std::vector<RunResult> runs;
  std::vector<CellSummary> cells;
};

inline std::string scenario_name(PolicyKind p, JammerKind j) {
  return std::string(to_string(p)) + "_" + std::string(to_string(j));
}

inline ScenarioConfig scenario_for(const ScenarioConfig& base, const RunKey& key) {
  ScenarioConfig c = base;
  c.policy = key.policy;
  c.jammer = key.jammer;
  c.seed = key.seed;
  c.name = scenario_name(key.policy, key.jammer);
  return c;
}

inline std::vector<RunKey> expand_runs(const ExperimentSpec& spec) {
  const auto policies = spec.policies.empty() ? std::vector<PolicyKind>{spec.base.policy} : spec.policies;
  const auto jammers = spec.jammers.empty() ? std::vector<JammerKind>{spec.base.jammer} : spec.jammers;
  std::vector<RunKey> keys;
  for (auto p : policies)
    for (auto j : jammers)
      for (auto s : spec.seeds) keys.push_back({p, j, s});
  return keys;
}

inline RunResult execute_run(const ExperimentSpec& spec, const RunKey& key) {
  const ScenarioConfig cfg = scenario_for(spec.base, key);
  const auto logs = run(cfg);
  const double ref = clean_sinr(cfg);
  return {key, cfg.name, windowed_metrics(logs, spec.window, ref), summarize_run(logs, ref)};
}

// Runs every key, `workers` at a time. Results come back in key order.
inline std::vector<RunResult> execute_runs(const ExperimentSpec& spec, const std::vector<RunKey>& keys,
                                           std::ostream* progress = nullptr) {
  std::vector<RunResult> results(keys.size());
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t i = next++; i < keys.size(); i = next++) {
      try {
        results[i] = execute_run(spec, keys[i]);
        if (progress) {
          std::lock_guard lock(mu);
          *progress << "  done " << results[i].scenario << " seed " << keys[i].seed << '\n' << std::flush;
        }
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min<int>(spec.workers, static_cast<int>(keys.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < n; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

// Mean and sample standard deviation per (policy, jammer) cell, in first-seen order.
inline std::vector<CellSummary> summarize_cells(const std::vector<RunResult>& runs) {
  std::vector<CellSummary> cells;
  std::vector<std::vector<const RunResult*>> members;
  for (const auto& r : runs) {
    std::size_t i = 0;
    while (i < cells.size() && !(cells[i].policy == r.key.policy && cells[i].jammer == r.key.jammer)) ++i;
    if (i == cells.size()) {
      cells.push_back({r.key.policy, r.key.jammer});
      members.emplace_back();
    }
    members[i].push_back(&r);
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& m = members[i];
    const double n = static_cast<double>(m.size());
    CellSummary& c = cells[i];
    c.seeds = m.size();
    for (const auto* r : m) {
      c.jammed_mean += r->summary.jammed_probability;
      c.sensing_mean += r->summary.sensing_probability;
      c.correlation_mean += r->summary.mean_correlation;
      c.throughput_mean += r->summary.normalized_throughput;
    }
    c.jammed_mean /= n;
    c.sensing_mean /= n;
    c.correlation_mean /= n;
    c.throughput_mean /= n;
    if (m.size() > 1) {
      double ss = 0.0;
      for (const auto* r : m) ss += (r->summary.jammed_probability - c.jammed_mean) * (r->summary.jammed_probability - c.jammed_mean);
      c.jammed_std = std::sqrt(ss / (n - 1.0));
    }
  }
  return cells;
}

inline void write_window_csv(std::ostream& os, const std::vector<MetricsRow>& rows) {
  os << "window,sensing_prob,mean_R,norm_throughput,jammed_prob\n";
  for (const auto& r : rows)
    os << r.window << ',' << format_g6(r.sensing_probability) << ',' << format_g6(r.mean_correlation) << ','
       << format_g6(r.normalized_throughput) << ',' << format_g6(r.jammed_probability) << '\n';
}

inline void write_summary_csv(std::ostream& os, const std::vector<CellSummary>& cells) {
  os << "policy,jammer,seeds,jammed_prob_mean,jammed_prob_std,sensing_prob_mean,mean_R_mean,norm_throughput_mean\n";
  for (const auto& c : cells)
    os << to_string(c.policy) << ',' << to_string(c.jammer) << ',' << c.seeds << ',' << format_g6(c.jammed_mean) << ','
       << format_g6(c.jammed_std) << ',' << format_g6(c.sensing_mean) << ',' << format_g6(c.correlation_mean) << ','
       << format_g6(c.throughput_mean) << '\n';
}

// Relative sensing-probability reduction of ADRLH against every other policy, per jammer.
inline void write_sensing_reduction_csv(std::ostream& os, const std::vector<CellSummary>& cells) {
  os << "jammer,baseline,baseline_sensing_prob,adrlh_sensing_prob,reduction\n";
  for (const auto& h : cells) {
    if (h.policy != PolicyKind::adrlh) continue;
    for (const auto& b : cells) {
      if (b.jammer != h.jammer || b.policy == PolicyKind::adrlh) continue;
      const double red = b.sensing_mean > 0.0 ? 1.0 - h.sensing_mean / b.sensing_mean : 0.0;
      os << to_string(h.jammer) << ',' << to_string(b.policy) << ',' << format_g6(b.sensing_mean) << ','
         << format_g6(h.sensing_mean) << ',' << format_g6(red) << '\n';
    }
  }
}

inline void print_table(std::ostream& os, const std::vector<CellSummary>& cells) {
  char line[160];
  std::snprintf(line, sizeof line, "%-8s %-10s %6s %18s %10s %10s %10s\n", "policy", "jammer", "seeds",
                "P(jammed) %", "sensing", "mean R", "thrpt");
  os << line;
  for (const auto& c : cells) {
    std::snprintf(line, sizeof line, "%-8s %-10s %6zu %9.4f +- %6.4f %10.4f %10.4f %10.4f\n",
                  std::string(to_string(c.policy)).c_str(), std::string(to_string(c.jammer)).c_str(), c.seeds,
                  100.0 * c.jammed_mean, 100.0 * c.jammed_std, c.sensing_mean, c.correlation_mean, c.throughput_mean);
    os << line;
  }
}

inline void write_file(const std::filesystem::path& path, auto&& writer) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("experiment.output_dir", "cannot write " + path.string());
  writer(os);
  if (!os) throw ConfigError("experiment.output_dir", "write failed for " + path.string());
}

inline ExperimentResult run_experiment(const ExperimentSpec& spec, std::ostream* progress = nullptr) {
  spec.validate();
  namespace fs = std::filesystem;
  const fs::path out(spec.output_dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) throw ConfigError("experiment.output_dir", "cannot create " + out.string());

  ExperimentResult result;
  result.runs = execute_runs(spec, expand_runs(spec), progress);
  result.cells = summarize_cells(result.runs);
  for (const auto& r : result.runs)
    write_file(out / (r.scenario + "_seed" + std::to_string(r.key.seed) + ".csv"),
               [&](std::ostream& os) { write_window_csv(os, r.windows); });
  write_file(out / "summary.csv", [&](std::ostream& os) { write_summary_csv(os, result.cells); });
  write_file(out / "sensing_reduction.csv", [&](std::ostream& os) { write_sensing_reduction_csv(os, result.cells); });
  return result;
}

}  // namespace hidjam
