#pragma once

// JSON scenario/experiment documents. Every key is optional and falls back to the
// built-in default; unknown keys and ill-typed values are ConfigErrors naming the
// dotted path of the field.

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "hidjam/arena.hpp"

namespace hidjam {

struct ExperimentSpec {
  ScenarioConfig base;
  std::vector<PolicyKind> policies;  // empty: the base scenario's policy
  std::vector<JammerKind> jammers;   // empty: the base scenario's jammer
  std::vector<std::uint64_t> seeds;
  std::size_t window = 100;
  int workers = 1;
  std::string output_dir = "results";

  void validate() const {
    base.validate();
    if (window == 0) throw ConfigError("experiment.window", "must be positive");
    if (workers < 1) throw ConfigError("experiment.workers", "must be positive");
    if (seeds.empty()) throw ConfigError("experiment.seeds", "need at least one seed");
    std::set<std::uint64_t> unique(seeds.begin(), seeds.end());
    if (unique.size() != seeds.size()) throw ConfigError("experiment.seeds", "seeds must be distinct");
  }
};

namespace detail {

class Section {
 public:
  Section(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  // Rejects keys that no reader asked for.
  void done() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(field(it.key()), "unknown key");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  template <typename T>
  void get(const std::string& key, T& out) {
    if (!has(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError(field(key), "wrong type");
    }
  }

  Section sub(const std::string& key) {
    seen_.insert(key);
    return Section(j_.at(key), field(key));
  }

  const nlohmann::json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

 private:
  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline void read_emitter(Section& s, EmitterSpec& e) {
  s.get("power_dbm", e.power_dbm);
  s.get("rolloff", e.rolloff);
}

inline void read_epsilon(Section& s, LinearEpsilon& e) {
  s.get("epsilon_start", e.start);
  s.get("epsilon_end", e.end);
  s.get("epsilon_decay_slots", e.decay_slots);
}

inline dqn::LayerSpec read_layer(const nlohmann::json& j, const std::string& path) {
  if (j.is_string()) {
    if (j.get<std::string>() == "relu") return dqn::LayerSpec::relu();
    throw ConfigError(path, "unknown layer '" + j.get<std::string>() + "'");
  }
  if (!j.is_object() || j.size() != 1) throw ConfigError(path, "expected \"relu\", {\"conv\": [...]} or {\"dense\": n}");
  try {
    if (j.contains("dense")) return dqn::LayerSpec::dense(j.at("dense").get<int>());
    if (j.contains("conv")) {
      const auto v = j.at("conv").get<std::vector<int>>();
      if (v.size() != 5) throw ConfigError(path + ".conv", "expected [filters, kernel_h, kernel_w, stride_h, stride_w]");
      return dqn::LayerSpec::conv(v[0], v[1], v[2], v[3], v[4]);
    }
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(path, "wrong type");
  }
  throw ConfigError(path, "unknown layer kind");
}

}  // namespace detail

inline ScenarioConfig scenario_from_json(const nlohmann::json& j) {
  ScenarioConfig c;
  detail::Section root(j, "");
  root.get("name", c.name);
  root.get("seed", c.seed);
  root.get("slots", c.decision_slots);
  if (root.has("plan")) {
    auto s = root.sub("plan");
    s.get("f_start_hz", c.plan.f_start);
    s.get("f_end_hz", c.plan.f_end);
    s.get("channels", c.plan.num_channels);
    s.get("resolution_hz", c.plan.resolution);
    s.done();
  }
  if (root.has("gains_db")) {
    auto s = root.sub("gains_db");
    s.get("tr", c.gains.tr_db);
    s.get("tj", c.gains.tj_db);
    s.get("jr", c.gains.jr_db);
    s.get("ej", c.gains.ej_db);
    s.get("er", c.gains.er_db);
    s.done();
  }
  if (root.has("noise")) {
    auto s = root.sub("noise");
    s.get("psd_dbm_hz", c.noise.psd_dbm_hz);
    s.done();
  }
  if (root.has("timing")) {
    auto s = root.sub("timing");
    s.get("sense_subslots", c.sense_subslots);
    s.done();
  }
  if (root.has("user")) {
    auto s = root.sub("user");
    if (s.has("policy")) {
      std::string name;
      s.get("policy", name);
      const auto k = parse_policy(name);
      if (!k) throw ConfigError(s.field("policy"), "unknown policy '" + name + "'");
      c.policy = *k;
    }
    detail::read_emitter(s, c.user_emitter);
    s.get("jammer_estimate_margin_db", c.jammer_estimate_margin_db);
    if (s.has("fhss")) {
      auto f = s.sub("fhss");
      f.get("period", c.fhss_period);
      f.get("pattern", c.fhss_pattern);
      f.done();
    }
    if (s.has("afh")) {
      auto a = s.sub("afh");
      a.get("margin_db", c.afh.margin_db);
      a.get("cooldown", c.afh.cooldown_slots);
      a.done();
    }
    s.done();
  }
  if (root.has("jammer")) {
    auto s = root.sub("jammer");
    if (s.has("kind")) {
      std::string name;
      s.get("kind", name);
      const auto k = parse_jammer(name);
      if (!k) throw ConfigError(s.field("kind"), "unknown jammer '" + name + "'");
      c.jammer = *k;
    }
    detail::read_emitter(s, c.jammer_emitter);
    s.get("detection_threshold_db", c.detection.threshold_db);
    s.get("self_jamming", c.self_jamming);
    if (s.has("q")) {
      auto q = s.sub("q");
      q.get("learning_rate", c.qjammer.learning_rate);
      q.get("discount", c.qjammer.discount);
      detail::read_epsilon(q, c.qjammer.epsilon);
      q.done();
    }
    s.done();
  }
  if (root.has("environment")) {
    auto s = root.sub("environment");
    s.get("channels", c.env_channels);
    detail::read_emitter(s, c.env_emitter);
    s.get("hop_interval", c.env_hop_interval);
    s.done();
  }
  if (root.has("reward")) {
    auto s = root.sub("reward");
    s.get("alpha", c.reward.alpha);
    s.get("window", c.reward.correlation.window);
    s.get("min_lag", c.reward.correlation.lags.min_lag);
    s.get("max_lag", c.reward.correlation.lags.max_lag);
    s.done();
  }
  if (root.has("dqn")) {
    auto s = root.sub("dqn");
    s.get("discount", c.dqn.discount);
    s.get("learning_rate", c.dqn.learning_rate);
    s.get("batch_size", c.dqn.batch_size);
    s.get("replay_capacity", c.dqn.replay_capacity);
    s.get("train_start_size", c.dqn.train_start_size);
    s.get("loss_threshold", c.dqn.loss_threshold);
    s.get("loss_window", c.dqn.loss_window);
    s.get("target_sync_interval", c.dqn.target_sync_interval);
    s.get("max_grad_norm", c.dqn.max_grad_norm);
    detail::read_epsilon(s, c.dqn.epsilon);
    s.get("history_frames", c.history_frames);
    s.get("floor_db", c.normalization.floor_db);
    s.get("ceil_db", c.normalization.ceil_db);
    if (s.has("layers")) {
      const auto& layers = s.raw("layers");
      if (!layers.is_array()) throw ConfigError(s.field("layers"), "expected an array");
      dqn::Architecture arch{{1, c.history_frames, c.plan.num_channels}, {}};
      for (std::size_t i = 0; i < layers.size(); ++i)
        arch.layers.push_back(detail::read_layer(layers[i], s.field("layers") + "[" + std::to_string(i) + "]"));
      c.architecture = arch;
    }
    s.done();
  }
  // "experiment" belongs to the experiment document; tolerated here.
  if (root.has("experiment")) (void)root.raw("experiment");
  root.done();
  if (c.architecture) c.architecture->input = {1, c.history_frames, c.plan.num_channels};
  c.validate();
  return c;
}

inline ExperimentSpec experiment_from_json(const nlohmann::json& j) {
  ExperimentSpec spec;
  spec.base = scenario_from_json(j);
  spec.seeds = {spec.base.seed};
  if (j.is_object() && j.contains("experiment")) {
    detail::Section s(j.at("experiment"), "experiment");
    int repetitions = 0;
    s.get("repetitions", repetitions);
    if (s.has("seeds")) {
      s.get("seeds", spec.seeds);
    } else if (repetitions > 0) {
      spec.seeds.clear();
      for (int i = 0; i < repetitions; ++i) spec.seeds.push_back(spec.base.seed + static_cast<std::uint64_t>(i));
    }
    if (s.has("repetitions") && repetitions < 1) throw ConfigError("experiment.repetitions", "must be positive");
    if (repetitions > 0 && static_cast<std::size_t>(repetitions) != spec.seeds.size())
      throw ConfigError("experiment.repetitions", "does not match the number of seeds");
    s.get("window", spec.window);
    s.get("workers", spec.workers);
    s.get("output_dir", spec.output_dir);
    if (s.has("policies")) {
      std::vector<std::string> names;
      s.get("policies", names);
      for (const auto& n : names) {
        const auto k = parse_policy(n);
        if (!k) throw ConfigError("experiment.policies", "unknown policy '" + n + "'");
        spec.policies.push_back(*k);
      }
    }
    if (s.has("jammers")) {
      std::vector<std::string> names;
      s.get("jammers", names);
      for (const auto& n : names) {
        const auto k = parse_jammer(n);
        if (!k) throw ConfigError("experiment.jammers", "unknown jammer '" + n + "'");
        spec.jammers.push_back(*k);
      }
    }
    s.done();
  }
  spec.validate();
  return spec;
}

inline nlohmann::json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path);
  try {
    return nlohmann::json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("<file>", std::string("malformed JSON: ") + e.what());
  }
}

inline ExperimentSpec load_experiment(const std::string& path) { return experiment_from_json(parse_json_file(path)); }

}  // namespace hidjam
