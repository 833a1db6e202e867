// Acceptance run: one PASS/FAIL line per criterion, tolerances pinned below.
//
//   acceptance [--out DIR] [--workers K]
//
// The scenario criteria (4-8) share one batch: every policy against both jammers,
// three seeds, 10,000 decision slots each, built on configs/default.json.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "hidjam/hidjam.hpp"
#include "oracles.hpp"

using namespace hidjam;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr std::int64_t kSlots = 10000;
const std::vector<std::uint64_t> kSeeds{1, 2, 3};
constexpr double kGradTol = 1e-4;
constexpr int kGradNetworks = 20;
constexpr double kDrlJamCeiling = 0.05;
constexpr double kFhssJamLo = 0.06, kFhssJamHi = 0.14;
constexpr double kQGap = 0.10;
constexpr double kFhssQFloor = 0.50;
constexpr double kSensingRatio = 0.50;
constexpr std::size_t kFinalWindows = 20;
constexpr std::size_t kTrendWindows = 10;
constexpr double kTrendDeadBand = 0.02;  // |change| below this counts as flat
constexpr double kThroughputBand = 0.15;
constexpr double kConservationTol = 1e-6;
constexpr double kChi2Crit9 = 21.666;  // 9 dof, alpha = 0.01
constexpr double kPropertyBudgetS = 60.0;
constexpr double kOracleBudgetS = 5.0;

int failures = 0;

void report(int n, bool pass, const std::string& detail) {
  std::printf("criterion %2d: %s  %s\n", n, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  failures += !pass;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- 1

void criterion_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const LagRange lags{-3, 3};
  long checked = 0, mismatches = 0;
  for (int a = 0; a < 81; ++a)
    for (int b = 0; b < 81; ++b) {
      const auto x = oracle::decode(a, 4, 3), y = oracle::decode(b, 4, 3);
      for (int m = lags.min_lag; m <= lags.max_lag; ++m) {
        ++checked;
        mismatches += rho(x, y, m) != oracle::rho(x, y, m, 3);
      }
      ++checked;
      mismatches += max_correlation(x, y, lags) != oracle::max_rho(x, y, lags.min_lag, lags.max_lag, 3);
    }
  const double dt = seconds_since(t0);
  report(1, mismatches == 0 && dt < kOracleBudgetS,
         fmt("%ld evaluations over 3^8 pairs, %ld mismatches, %.3f s", checked, mismatches, dt));
}

// ---------------------------------------------------------------- 2

void criterion_follower_identity() {
  ScenarioConfig c;
  c.policy = PolicyKind::fhss;
  c.fhss_pattern = {3, 7, 1, 9, 5, 2, 8, 4, 10, 6};
  c.jammer = JammerKind::follower;
  c.env_channels.clear();  // nothing masks the user: detection is perfect
  c.decision_slots = 2000;
  const auto logs = run(c);
  const auto settled = std::span<const SlotLog>(logs).subspan(c.reward.correlation.history_capacity());
  double r_sum = 0.0;
  for (const auto& l : settled) r_sum += l.correlation;
  const double mean_r = r_sum / static_cast<double>(settled.size());
  const double sens = sensing_probability(logs);
  report(2, mean_r == 1.0 && sens == 1.0, fmt("mean R after fill = %.6f, sensing = %.6f", mean_r, sens));
}

// ---------------------------------------------------------------- 3

void criterion_gradients() {
  std::mt19937_64 rng(20240601);
  double worst = 0.0;
  for (int i = 0; i < kGradNetworks; ++i) worst = std::max(worst, oracle::gradient_check(rng));
  report(3, worst < kGradTol, fmt("worst relative error %.3g over %d networks", worst, kGradNetworks));
}

// ---------------------------------------------------------------- 4-8

struct Batch {
  std::vector<RunResult> runs;
  const RunResult& get(PolicyKind p, JammerKind j, std::uint64_t s) const {
    for (const auto& r : runs)
      if (r.key.policy == p && r.key.jammer == j && r.key.seed == s) return r;
    throw std::logic_error("missing run");
  }
  double mean(PolicyKind p, JammerKind j, double RunSummary::*field) const {
    double sum = 0.0;
    for (auto s : kSeeds) sum += get(p, j, s).summary.*field;
    return sum / static_cast<double>(kSeeds.size());
  }
  // Seed-averaged per-window curve.
  std::vector<double> curve(PolicyKind p, JammerKind j, double MetricsRow::*field) const {
    std::vector<double> out;
    for (auto s : kSeeds) {
      const auto& w = get(p, j, s).windows;
      out.resize(w.size(), 0.0);
      for (std::size_t i = 0; i < w.size(); ++i) out[i] += w[i].*field / static_cast<double>(kSeeds.size());
    }
    return out;
  }
};

double head_mean(const std::vector<double>& v, std::size_t n) {
  return std::accumulate(v.begin(), v.begin() + n, 0.0) / static_cast<double>(n);
}
double tail_mean(const std::vector<double>& v, std::size_t n) {
  return std::accumulate(v.end() - n, v.end(), 0.0) / static_cast<double>(n);
}

int trend(double delta) { return delta > kTrendDeadBand ? 1 : delta < -kTrendDeadBand ? -1 : 0; }

void criterion_follower_table(const Batch& b) {
  const auto J = JammerKind::follower;
  bool ok = true;
  std::string detail;
  for (auto s : kSeeds) {
    const double afh = b.get(PolicyKind::afh, J, s).summary.jammed_probability;
    const double fhss = b.get(PolicyKind::fhss, J, s).summary.jammed_probability;
    const double a = b.get(PolicyKind::adrla, J, s).summary.jammed_probability;
    const double h = b.get(PolicyKind::adrlh, J, s).summary.jammed_probability;
    const bool seed_ok = afh > fhss && fhss > a && a >= h && a < kDrlJamCeiling && h < kDrlJamCeiling &&
                         fhss >= kFhssJamLo && fhss <= kFhssJamHi;
    ok = ok && seed_ok;
    detail += fmt("[seed %llu AFH %.2f%% FHSS %.2f%% ADRLA %.2f%% ADRLH %.2f%%%s] ", (unsigned long long)s, 100 * afh,
                  100 * fhss, 100 * a, 100 * h, seed_ok ? "" : " x");
  }
  report(4, ok, detail);
}

void criterion_q_table(const Batch& b) {
  const auto J = JammerKind::qlearning;
  const double a = b.mean(PolicyKind::adrla, J, &RunSummary::jammed_probability);
  const double h = b.mean(PolicyKind::adrlh, J, &RunSummary::jammed_probability);
  const double fhss = b.mean(PolicyKind::fhss, J, &RunSummary::jammed_probability);
  report(5, a - h >= kQGap && fhss > kFhssQFloor,
         fmt("ADRLA %.2f%% ADRLH %.2f%% (gap %.2f pp), FHSS %.2f%%", 100 * a, 100 * h, 100 * (a - h), 100 * fhss));
}

void criterion_hiding(const Batch& b) {
  const auto J = JammerKind::follower;
  auto final_sensing = [&](PolicyKind p) {
    return tail_mean(b.curve(p, J, &MetricsRow::sensing_probability), kFinalWindows);
  };
  const double a = final_sensing(PolicyKind::adrla), h = final_sensing(PolicyKind::adrlh);
  report(6, h <= kSensingRatio * a,
         fmt("final sensing ADRLA %.4f ADRLH %.4f (reduction %.1f%%)", a, h, a > 0 ? 100 * (1 - h / a) : 0.0));
}

void criterion_trends(const Batch& b) {
  const auto J = JammerKind::follower;
  bool ok = true;
  std::string detail;
  for (auto p : kAllPolicies) {
    const auto r = b.curve(p, J, &MetricsRow::mean_correlation);
    const auto s = b.curve(p, J, &MetricsRow::sensing_probability);
    const double dr = tail_mean(r, kTrendWindows) - head_mean(r, kTrendWindows);
    const double ds = tail_mean(s, kTrendWindows) - head_mean(s, kTrendWindows);
    const bool same = trend(dr) == trend(ds);
    ok = ok && same;
    detail += fmt("[%s dR %+.3f dSens %+.3f%s] ", std::string(to_string(p)).c_str(), dr, ds, same ? "" : " x");
  }
  report(7, ok, detail);
}

void criterion_throughput(const Batch& b) {
  const auto J = JammerKind::follower;
  auto thr = [&](PolicyKind p) { return b.mean(p, J, &RunSummary::normalized_throughput); };
  const double f = thr(PolicyKind::fhss), a = thr(PolicyKind::afh), l = thr(PolicyKind::adrla),
               h = thr(PolicyKind::adrlh);
  report(8, h > f && h > a && std::abs(h - l) <= kThroughputBand,
         fmt("FHSS %.4f AFH %.4f ADRLA %.4f ADRLH %.4f", f, a, l, h));
}

// ---------------------------------------------------------------- 9

void criterion_determinism(const ScenarioConfig& base) {
  const auto root = fs::temp_directory_path() / "hidjam_acceptance_determinism";
  fs::remove_all(root);
  ExperimentSpec spec;
  spec.base = base;
  spec.base.decision_slots = 600;
  spec.policies = {kAllPolicies.begin(), kAllPolicies.end()};
  spec.jammers = {JammerKind::follower, JammerKind::qlearning};
  spec.seeds = {5, 6};
  spec.workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::array<std::map<std::string, std::string>, 2> outputs;
  for (int rep = 0; rep < 2; ++rep) {
    spec.output_dir = (root / std::to_string(rep)).string();
    run_experiment(spec);
    for (const auto& e : fs::directory_iterator(spec.output_dir)) {
      std::ifstream in(e.path(), std::ios::binary);
      std::stringstream ss;
      ss << in.rdbuf();
      outputs[rep][e.path().filename().string()] = ss.str();
    }
  }
  fs::remove_all(root);
  report(9, !outputs[0].empty() && outputs[0] == outputs[1],
         fmt("%zu CSV files compared byte for byte", outputs[0].size()));
}

// ---------------------------------------------------------------- 10

void criterion_properties() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::string> broken;

  // conservation: an emitter well inside the band keeps all of its power in-band
  ChannelPlan plan;
  double worst_cons = 0.0;
  for (double beta : {0.0, 0.1, 0.25, 0.5, 0.75, 1.0}) {
    const EmitterSpec e{30.0, beta, EmitterRole::user};
    for (Channel c = 3; c <= 8; ++c) {
      double sum = 0.0;
      for (Channel k = 1; k <= plan.num_channels; ++k) sum += channel_power_fraction(c, k, e, plan);
      worst_cons = std::max(worst_cons, std::abs(sum - 1.0));
    }
  }
  if (worst_cons > kConservationTol) broken.push_back(fmt("conservation %.3g", worst_cons));

  // metric ranges
  Rng rng(77);
  bool ranges = true;
  for (int t = 0; t < 2000; ++t) {
    std::vector<Channel> x(10), y(15);
    for (auto& v : x) v = uniform_channel(10, rng);
    for (auto& v : y) v = rng() % 5 == 0 ? kNone : uniform_channel(10, rng);
    const double r = max_correlation(x, y, {0, 5});
    ranges = ranges && r >= 0.0 && r <= 1.0;
  }
  ScenarioConfig sc;
  sc.policy = PolicyKind::afh;
  sc.jammer = JammerKind::qlearning;
  sc.decision_slots = 2000;
  const auto logs = run(sc);
  for (const auto& row : windowed_metrics(logs, 100, clean_sinr(sc)))
    for (double v : {row.sensing_probability, row.mean_correlation, row.normalized_throughput, row.jammed_probability})
      ranges = ranges && v >= 0.0 && v <= 1.0;
  if (!ranges) broken.push_back("metric range");

  // epsilon-greedy uniformity
  {
    const std::vector<double> q{5, 1, 2, 3, 4, 0, 1, 2, 3, 4};
    std::array<int, 10> counts{};
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) ++counts[dqn::select_action<double>(q, 1.0, rng) - 1];
    double chi2 = 0;
    for (int c : counts) chi2 += (c - draws / 10.0) * (c - draws / 10.0) / (draws / 10.0);
    if (chi2 >= kChi2Crit9) broken.push_back(fmt("epsilon-greedy chi2 %.2f", chi2));
  }

  // replay uniformity over a full buffer of 10
  {
    dqn::ReplayBuffer buf(10);
    for (int i = 0; i < 25; ++i) buf.push({StateMatrix(1, 2), 1 + i % 2, double(i), StateMatrix(1, 2)});
    std::array<int, 10> counts{};
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) ++counts[buf.sample_index(rng)];
    double chi2 = 0;
    for (int c : counts) chi2 += (c - draws / 10.0) * (c - draws / 10.0) / (draws / 10.0);
    if (chi2 >= kChi2Crit9) broken.push_back(fmt("replay chi2 %.2f", chi2));
  }

  // Q-table boundedness: rewards in {0, 1} keep every entry inside [0, 1 / (1 - gamma)]
  {
    QJammerParams p;
    QLearningJammer j(10, p);
    Channel key = kNone, act = j.choose(key, 1.0, rng);
    for (int t = 0; t < 200000; ++t) {
      const Channel seen = uniform_channel(10, rng) % 3 == 0 ? kNone : uniform_channel(3, rng);
      act = j.step(key, act, seen == act ? 1.0 : 0.0, seen, rng);
      key = seen;
    }
    const double hi = 1.0 / (1.0 - p.discount);
    bool bounded = true;
    for (Channel k = 0; k <= 10; ++k)
      for (double v : j.row(k)) bounded = bounded && v >= 0.0 && v <= hi;
    if (!bounded) broken.push_back("Q-table bound");
  }

  const double dt = seconds_since(t0);
  if (dt >= kPropertyBudgetS) broken.push_back(fmt("took %.1f s", dt));
  std::string detail = fmt("conservation %.2g, %.2f s", worst_cons, dt);
  for (const auto& b : broken) detail += "; broken: " + b;
  report(10, broken.empty(), detail);
}

}  // namespace

int main(int argc, char** argv) {
  std::string out_dir;
  int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--out" && i + 1 < argc) {
      out_dir = argv[++i];
    } else if (a == "--workers" && i + 1 < argc) {
      workers = std::max(1, std::atoi(argv[++i]));
    } else {
      std::cerr << "usage: acceptance [--out DIR] [--workers K]\n";
      return 2;
    }
  }

  const auto spec_file = std::string(HIDJAM_CONFIG_DIR) + "/default.json";
  const ExperimentSpec shipped = load_experiment(spec_file);

  criterion_oracle();
  criterion_follower_identity();
  criterion_gradients();
  criterion_properties();
  criterion_determinism(shipped.base);

  ExperimentSpec spec = shipped;
  spec.base.decision_slots = kSlots;
  spec.policies = {kAllPolicies.begin(), kAllPolicies.end()};
  spec.jammers = {kTableJammers.begin(), kTableJammers.end()};
  spec.seeds = kSeeds;
  spec.workers = workers;
  const auto t0 = std::chrono::steady_clock::now();
  Batch batch;
  try {
    if (out_dir.empty()) {
      batch.runs = execute_runs(spec, expand_runs(spec), &std::cerr);
    } else {
      spec.output_dir = out_dir;
      batch.runs = run_experiment(spec, &std::cerr).runs;
    }
  } catch (const std::exception& e) {
    for (int n = 4; n <= 8; ++n) report(n, false, std::string("scenario batch failed: ") + e.what());
    std::printf("%d of 10 criteria failed\n", failures);
    return 1;
  }
  std::cerr << "scenario batch: " << batch.runs.size() << " runs in " << seconds_since(t0) << " s\n";
  print_table(std::cout, summarize_cells(batch.runs));

  criterion_follower_table(batch);
  criterion_q_table(batch);
  criterion_hiding(batch);
  criterion_trends(batch);
  criterion_throughput(batch);

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
