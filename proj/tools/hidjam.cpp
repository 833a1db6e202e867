// Command-line front end: run an experiment grid, print the policy x jammer table,
// or document the metric columns.

#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hidjam/experiment.hpp"

namespace {

constexpr const char* kMetricsDoc = R"(Per-run CSV  <out>/<POLICY>_<jammer>_seed<seed>.csv, one row per metric window:
  window           zero-based index of a window of W consecutive decision slots
                   (W = experiment.window, default 100; the last window may be partial)
  sensing_prob     share of slots in which the jammer's detection equals the user's
                   true channel
  mean_R           mean over the window of the user's max lagged action correlation
                   R in [0, 1], computed from its own action history and its
                   estimate of the jammer's channels
  norm_throughput  mean of log2(1 + SINR) / log2(1 + SINR_clean), clipped to [0, 1];
                   SINR_clean is the best single-channel SINR with no jammer and no
                   environmental interference
  jammed_prob      share of slots in which the jammer transmitted on the user's channel

summary.csv, one row per (policy, jammer), over the final 20% of each run:
  policy, jammer, seeds
  jammed_prob_mean, jammed_prob_std   mean and sample std (n-1) across seeds
  sensing_prob_mean, mean_R_mean, norm_throughput_mean

sensing_reduction.csv: 1 - sensing(ADRLH) / sensing(baseline) for each jammer and
each other policy in the grid.

All numbers are printed with %.6g.
)";

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    try {
      out.push_back(std::stoull(item, &used));
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw hidjam::ConfigError("--seeds", "bad seed '" + item + "'");
  }
  return out;
}

int report(const std::exception& e) {
  std::cerr << "error: " << e.what() << '\n';
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hide-and-jam spectrum game simulator"};
  app.require_subcommand(1);

  std::string config, out, seeds;
  int workers = 0;
  std::int64_t slots = 0;

  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  run->add_option("config", config, "JSON config")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "Output directory (overrides experiment.output_dir)");
  run->add_option("--seeds", seeds, "Comma-separated seeds (overrides experiment.seeds)");
  run->add_option("--workers", workers, "Parallel runs")->check(CLI::PositiveNumber);
  run->add_option("--slots", slots, "Decision slots per run")->check(CLI::PositiveNumber);

  auto* table = app.add_subcommand("table41", "Run every policy against both jammers and print P(jammed)");
  table->add_option("config", config, "JSON config")->required()->check(CLI::ExistingFile);
  table->add_option("--out", out, "Output directory");
  table->add_option("--seeds", seeds, "Comma-separated seeds");
  table->add_option("--workers", workers, "Parallel runs")->check(CLI::PositiveNumber);
  table->add_option("--slots", slots, "Decision slots per run")->check(CLI::PositiveNumber);

  auto* metrics = app.add_subcommand("metrics", "Describe the output columns");
  metrics->footer(kMetricsDoc);
  metrics->callback([] { std::cout << kMetricsDoc; });

  CLI11_PARSE(app, argc, argv);
  if (metrics->parsed()) return 0;

  try {
    auto spec = hidjam::load_experiment(config);
    if (!out.empty()) spec.output_dir = out;
    if (!seeds.empty()) spec.seeds = parse_seeds(seeds);
    if (workers > 0) spec.workers = workers;
    if (slots > 0) spec.base.decision_slots = slots;
    if (table->parsed()) {
      spec.policies.assign(hidjam::kAllPolicies.begin(), hidjam::kAllPolicies.end());
      spec.jammers.assign(hidjam::kTableJammers.begin(), hidjam::kTableJammers.end());
    }
    spec.validate();
    const auto result = hidjam::run_experiment(spec, &std::cerr);
    hidjam::print_table(std::cout, result.cells);
    std::cout << "results written to " << spec.output_dir << '\n';
  } catch (const std::exception& e) {
    return report(e);
  }
  return 0;
}
