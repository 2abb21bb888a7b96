// Copyright 2026 The seanet-cpp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Full-length evaluation and report serialization.

#ifndef SEANET_TRAIN_EVALUATE_HPP_
#define SEANET_TRAIN_EVALUATE_HPP_

#include <fstream>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "seanet/metrics/metrics.hpp"
#include "seanet/nn/network.hpp"
#include "seanet/train/checkpoint.hpp"
#include "seanet/train/data.hpp"

namespace seanet {

/// Maps a mixture to an estimate of the target. Lets the evaluation runner
/// score stubs as well as networks.
using Extractor = std::function<Waveform(const MixtureSample&)>;

template <typename T>
Extractor network_extractor(const ExtractionNetwork<T>& net) {
  return [&net](const MixtureSample& m) {
    Example<T> ex = make_example<T>(m, net.config());
    NoGradGuard guard;
    Matrix<T> est = net.forward(Var<T>(ex.mixture), visual_input(net, ex)).estimate().value();
    return to_waveform(est, m.mixture.sample_rate);
  };
}

struct EvalOptions {
  IncorrectSegmentOptions incorrect;
  // Called with each scored mixture and its estimate (plots, WAV export).
  std::function<void(const MixtureSample&, const Waveform&, const MetricsRow&)> on_item;
};

/// Scores every mixture at full length. Items that throw are recorded with
/// their error and excluded from the means.
inline MetricsReport evaluate(const Extractor& extract, const std::vector<MixtureSample>& items,
                              const EvalOptions& opts = {}) {
  MetricsReport rep;
  for (const auto& m : items) {
    try {
      Waveform est = extract(m);
      MetricsRow row = score_utterance(m.id, est, m.mixture, m.target, m.noise, opts.incorrect);
      if (opts.on_item) opts.on_item(m, est, row);
      rep.rows.push_back(row);
    } catch (const std::exception& e) {
      MetricsRow row;
      row.id = m.id;
      row.error = e.what();
      rep.rows.push_back(row);
    }
  }
  rep.finalize();
  return rep;
}

/// Manifest evaluation; unreadable items become error rows.
inline MetricsReport evaluate_manifest(const Extractor& extract, const std::string& manifest,
                                       const EvalOptions& opts = {}, int sample_rate = kDefaultSampleRate) {
  std::vector<std::pair<std::string, std::string>> errors;
  DataSpec spec;
  spec.manifest = manifest;
  std::vector<MixtureSample> items = load_mixtures(spec, &errors, sample_rate);
  MetricsReport rep = evaluate(extract, items, opts);
  for (const auto& [id, what] : errors) {
    MetricsRow row;
    row.id = id;
    row.error = what;
    rep.rows.push_back(row);
  }
  rep.finalize();
  return rep;
}

/// Network rebuilt from a checkpoint's embedded configuration. Loading is
/// read-only on the checkpoint file.
template <typename T>
std::unique_ptr<ExtractionNetwork<T>> load_network(const std::string& ckpt_path) {
  Checkpoint<T> ck = load_checkpoint<T>(ckpt_path);
  if (!ck.meta.contains("network")) throw std::runtime_error(ckpt_path + ": checkpoint has no network config");
  auto net = std::make_unique<ExtractionNetwork<T>>(network_config_from_json(ck.meta["network"]));
  apply_checkpoint(ck, net->parameters(), true);
  return net;
}

inline nlohmann::json to_json(const MetricsRow& r) {
  nlohmann::json j = {{"id", r.id},
                      {"si_sdr", r.si_sdr},
                      {"sdr", r.sdr},
                      {"si_sdri", r.si_sdri},
                      {"sdri", r.sdri},
                      {"incorrect_segments", r.incorrect_segments}};
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

inline nlohmann::json to_json(const MetricsReport& rep) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : rep.rows) rows.push_back(to_json(r));
  return {{"rows", rows},
          {"mean_si_sdr", rep.mean_si_sdr},
          {"mean_sdr", rep.mean_sdr},
          {"mean_si_sdri", rep.mean_si_sdri},
          {"mean_sdri", rep.mean_sdri},
          {"total_incorrect_segments", rep.total_incorrect_segments},
          {"failures", rep.failures}};
}

inline MetricsReport report_from_json(const nlohmann::json& j) {
  MetricsReport rep;
  for (const auto& r : j.at("rows")) {
    MetricsRow row;
    row.id = r.at("id").get<std::string>();
    row.si_sdr = r.value("si_sdr", 0.0);
    row.sdr = r.value("sdr", 0.0);
    row.si_sdri = r.value("si_sdri", 0.0);
    row.sdri = r.value("sdri", 0.0);
    row.incorrect_segments = r.value("incorrect_segments", 0);
    row.error = r.value("error", std::string());
    rep.rows.push_back(row);
  }
  rep.finalize();
  return rep;
}

inline void write_report(const std::string& path, const MetricsReport& rep) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write report " + path);
  os << to_json(rep).dump(2) << '\n';
}

inline MetricsReport read_report(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open report " + path);
  try {
    return report_from_json(nlohmann::json::parse(is));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": malformed report: " + e.what());
  }
}

}  // namespace seanet

#endif  // SEANET_TRAIN_EVALUATE_HPP_
