// Copyright 2026 The seanet-cpp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Training configuration and learning-rate schedule.

#ifndef SEANET_TRAIN_CONFIG_HPP_
#define SEANET_TRAIN_CONFIG_HPP_

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "seanet/nn/config.hpp"
#include "seanet/signal/mixing.hpp"

namespace seanet {

enum class DecayRule {
  kMultiplicative,  // lr0 * decay^floor(epoch / every)
  kLinear,          // lr0 * (1 - (1 - decay) * floor(epoch / every)), floored at 0
};

inline std::string to_string(DecayRule r) { return r == DecayRule::kLinear ? "linear" : "multiplicative"; }

inline DecayRule parse_decay_rule(const std::string& s) {
  if (s == "multiplicative") return DecayRule::kMultiplicative;
  if (s == "linear") return DecayRule::kLinear;
  throw std::invalid_argument("unknown lr decay rule \"" + s + "\" (expected multiplicative|linear)");
}

/// Synthetic data specification: `count` mixtures cycling over `scenarios`,
/// each `duration` seconds, seeded from `seed`.
struct SyntheticData {
  int count = 200;
  std::vector<Scenario> scenarios = {Scenario::kSN, Scenario::kSS, Scenario::kSSN};
  double duration = 2.0;
  uint64_t seed = 1000;
};

struct DataSpec {
  std::optional<std::string> manifest;  // JSONL manifest; overrides `synthetic` when set
  SyntheticData synthetic;
};

struct TrainConfig {
  double lr = 1e-3;
  double lr_decay = 0.97;
  int decay_every = 3;
  DecayRule decay_rule = DecayRule::kMultiplicative;
  int max_epochs = 150;
  int validate_every = 3;
  double segment_seconds = 2.0;
  int batch_size = 4;  // gradients are accumulated over this many mixtures
  uint64_t seed = 1;
  double grad_clip = 5.0;  // global norm; <= 0 disables
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int max_steps = 0;  // > 0 stops after this many optimizer steps
  NetworkConfig network;
  DataSpec train_data;
  DataSpec val_data;
  std::string output_dir = "run";

  TrainConfig() {
    val_data.synthetic.count = 40;
    val_data.synthetic.seed = 9000;
  }

  double lr_at(int epoch) const {
    const int steps = epoch / decay_every;
    if (decay_rule == DecayRule::kLinear) return lr * std::max(0.0, 1.0 - (1.0 - lr_decay) * steps);
    return lr * std::pow(lr_decay, steps);
  }

  void validate() const {
    auto fail = [](const std::string& m) { throw std::invalid_argument("TrainConfig: " + m); };
    if (!(lr > 0.0)) fail("lr must be positive");
    if (!(lr_decay > 0.0 && lr_decay <= 1.0)) fail("lr_decay must be in (0, 1]");
    if (decay_every < 1) fail("decay_every must be >= 1");
    if (max_epochs < 1) fail("max_epochs must be >= 1");
    if (validate_every < 1) fail("validate_every must be >= 1");
    if (!(segment_seconds > 0.0)) fail("segment_seconds must be positive");
    if (batch_size < 1) fail("batch_size must be >= 1");
    if (max_steps < 0) fail("max_steps must be >= 0");
    if (!train_data.manifest && train_data.synthetic.count < 1) fail("training set is empty");
    if (!train_data.manifest && train_data.synthetic.scenarios.empty()) fail("no training scenarios");
    network.validate();
  }
};

inline nlohmann::json to_json(const DataSpec& d) {
  nlohmann::json j;
  if (d.manifest) j["manifest"] = *d.manifest;
  std::vector<std::string> sc;
  for (Scenario s : d.synthetic.scenarios) sc.push_back(to_string(s));
  j["synthetic"] = {{"count", d.synthetic.count},
                    {"scenarios", sc},
                    {"duration", d.synthetic.duration},
                    {"seed", d.synthetic.seed}};
  return j;
}

inline nlohmann::json to_json(const TrainConfig& c) {
  return {{"lr", c.lr},
          {"lr_decay", c.lr_decay},
          {"decay_every", c.decay_every},
          {"decay_rule", to_string(c.decay_rule)},
          {"max_epochs", c.max_epochs},
          {"validate_every", c.validate_every},
          {"segment_seconds", c.segment_seconds},
          {"batch_size", c.batch_size},
          {"seed", c.seed},
          {"grad_clip", c.grad_clip},
          {"adam_beta1", c.adam_beta1},
          {"adam_beta2", c.adam_beta2},
          {"adam_eps", c.adam_eps},
          {"max_steps", c.max_steps},
          {"network", to_json(c.network)},
          {"train_data", to_json(c.train_data)},
          {"val_data", to_json(c.val_data)},
          {"output_dir", c.output_dir}};
}

namespace detail {

inline void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> known, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) throw std::invalid_argument(where + ": unknown key \"" + it.key() + "\"");
  }
}

inline DataSpec data_spec_from_json(const nlohmann::json& j, DataSpec d, const std::string& where) {
  reject_unknown(j, {"manifest", "synthetic"}, where);
  if (j.contains("manifest")) d.manifest = j["manifest"].get<std::string>();
  if (j.contains("synthetic")) {
    const auto& s = j["synthetic"];
    reject_unknown(s, {"count", "scenarios", "duration", "seed"}, where + ".synthetic");
    if (s.contains("count")) d.synthetic.count = s["count"].get<int>();
    if (s.contains("duration")) d.synthetic.duration = s["duration"].get<double>();
    if (s.contains("seed")) d.synthetic.seed = s["seed"].get<uint64_t>();
    if (s.contains("scenarios")) {
      d.synthetic.scenarios.clear();
      for (const auto& x : s["scenarios"]) d.synthetic.scenarios.push_back(parse_scenario(x.get<std::string>()));
    }
  }
  return d;
}

}  // namespace detail

/// Parses a config object; absent keys keep their defaults, unknown keys
/// are rejected.
inline TrainConfig train_config_from_json(const nlohmann::json& j) {
  detail::reject_unknown(j,
                         {"lr", "lr_decay", "decay_every", "decay_rule", "max_epochs", "validate_every",
                          "segment_seconds", "batch_size", "seed", "grad_clip", "adam_beta1", "adam_beta2",
                          "adam_eps", "max_steps", "network", "train_data", "val_data", "output_dir"},
                         "train config");
  TrainConfig c;
  try {
    if (j.contains("lr")) c.lr = j["lr"].get<double>();
    if (j.contains("lr_decay")) c.lr_decay = j["lr_decay"].get<double>();
    if (j.contains("decay_every")) c.decay_every = j["decay_every"].get<int>();
    if (j.contains("decay_rule")) c.decay_rule = parse_decay_rule(j["decay_rule"].get<std::string>());
    if (j.contains("max_epochs")) c.max_epochs = j["max_epochs"].get<int>();
    if (j.contains("validate_every")) c.validate_every = j["validate_every"].get<int>();
    if (j.contains("segment_seconds")) c.segment_seconds = j["segment_seconds"].get<double>();
    if (j.contains("batch_size")) c.batch_size = j["batch_size"].get<int>();
    if (j.contains("seed")) c.seed = j["seed"].get<uint64_t>();
    if (j.contains("grad_clip")) c.grad_clip = j["grad_clip"].get<double>();
    if (j.contains("adam_beta1")) c.adam_beta1 = j["adam_beta1"].get<double>();
    if (j.contains("adam_beta2")) c.adam_beta2 = j["adam_beta2"].get<double>();
    if (j.contains("adam_eps")) c.adam_eps = j["adam_eps"].get<double>();
    if (j.contains("max_steps")) c.max_steps = j["max_steps"].get<int>();
    if (j.contains("network")) c.network = network_config_from_json(j["network"]);
    if (j.contains("train_data")) c.train_data = detail::data_spec_from_json(j["train_data"], c.train_data, "train_data");
    if (j.contains("val_data")) c.val_data = detail::data_spec_from_json(j["val_data"], c.val_data, "val_data");
    if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("train config: ") + e.what());
  }
  c.validate();
  return c;
}

inline TrainConfig load_train_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  return train_config_from_json(j);
}

}  // namespace seanet

#endif  // SEANET_TRAIN_CONFIG_HPP_
