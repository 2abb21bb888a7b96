// Copyright 2026 The seanet-cpp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Ablation suites: train each variant on identical data and seeds, score on
// a held-out synthetic set and compare the measured ranking with the
// published one.

#ifndef SEANET_TRAIN_ABLATION_HPP_
#define SEANET_TRAIN_ABLATION_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "seanet/train/evaluate.hpp"
#include "seanet/train/trainer.hpp"

namespace seanet {

enum class AblationSuite { kTableV, kAlphaBetaGamma, kScenarios, kMmVariants, kBetaSweep };

inline std::string to_string(AblationSuite s) {
  switch (s) {
    case AblationSuite::kTableV: return "TABLE_V";
    case AblationSuite::kAlphaBetaGamma: return "ALPHA_BETA_GAMMA";
    case AblationSuite::kScenarios: return "SCENARIOS";
    case AblationSuite::kMmVariants: return "MM_VARIANTS";
    case AblationSuite::kBetaSweep: return "BETA_SWEEP";
  }
  return "?";
}

inline AblationSuite parse_ablation_suite(const std::string& s) {
  for (AblationSuite a : {AblationSuite::kTableV, AblationSuite::kAlphaBetaGamma, AblationSuite::kScenarios,
                          AblationSuite::kMmVariants, AblationSuite::kBetaSweep})
    if (to_string(a) == s) return a;
  throw std::invalid_argument("unknown ablation suite \"" + s +
                              "\" (expected TABLE_V|ALPHA_BETA_GAMMA|SCENARIOS|MM_VARIANTS|BETA_SWEEP)");
}

/// One configuration of a suite.
struct AblationEntry {
  std::string label;
  NetworkConfig network;
  std::optional<double> published_si_sdr;  // reference value, dB
  std::optional<Scenario> eval_scenario;   // SCENARIOS: score one scenario only
  bool finetune_from_base = false;         // MM_VARIANTS: start from the trained base network
  std::string note;
  std::string train_key;                   // entries with equal non-empty keys share trained networks
};

struct AblationRow {
  std::string label;
  std::vector<double> seed_si_sdri;
  double mean_si_sdri = 0.0;
  double mean_sdri = 0.0;
  double mean_si_sdr = 0.0;
  double mean_incorrect = 0.0;  // incorrect segments per seed, summed over the test set
  std::optional<double> published_si_sdr;
  std::string note;
};

struct AblationTable {
  AblationSuite suite = AblationSuite::kTableV;
  std::vector<AblationRow> rows;              // suite order
  std::vector<std::string> published_order;   // best first
  std::vector<std::string> measured_order;    // best first, by mean SI-SDRi
  double pairwise_agreement = 0.0;            // fraction of published pairs ranked the same way
  bool ordering_reproduced = false;           // measured order == published order

  const AblationRow& row(const std::string& label) const {
    for (const auto& r : rows)
      if (r.label == label) return r;
    throw std::out_of_range("ablation table has no row " + label);
  }

  std::string to_text() const {
    std::ostringstream os;
    os << "suite " << to_string(suite) << "\n";
    os << std::left << std::setw(22) << "method" << std::right << std::setw(10) << "SI-SDRi" << std::setw(10) << "SDRi"
       << std::setw(10) << "SI-SDR" << std::setw(11) << "incorrect" << std::setw(11) << "published" << "  note\n";
    std::vector<const AblationRow*> ranked;
    for (const auto& r : rows) ranked.push_back(&r);
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const AblationRow* a, const AblationRow* b) { return a->mean_si_sdri > b->mean_si_sdri; });
    os << std::fixed << std::setprecision(2);
    for (const AblationRow* r : ranked) {
      os << std::left << std::setw(22) << r->label << std::right << std::setw(10) << r->mean_si_sdri << std::setw(10)
         << r->mean_sdri << std::setw(10) << r->mean_si_sdr << std::setw(11) << r->mean_incorrect << std::setw(11);
      if (r->published_si_sdr) os << *r->published_si_sdr;
      else os << "-";
      os << "  " << r->note << "\n";
    }
    os << "published order: ";
    for (size_t i = 0; i < published_order.size(); ++i) os << (i ? " > " : "") << published_order[i];
    os << "\nmeasured order:  ";
    for (size_t i = 0; i < measured_order.size(); ++i) os << (i ? " > " : "") << measured_order[i];
    os << "\npairwise agreement " << pairwise_agreement << ", ordering "
       << (ordering_reproduced ? "reproduced" : "not reproduced") << "\n";
    return os.str();
  }

  nlohmann::json to_json() const {
    nlohmann::json rs = nlohmann::json::array();
    for (const auto& r : rows) {
      nlohmann::json j = {{"label", r.label},
                          {"seed_si_sdri", r.seed_si_sdri},
                          {"mean_si_sdri", r.mean_si_sdri},
                          {"mean_sdri", r.mean_sdri},
                          {"mean_si_sdr", r.mean_si_sdr},
                          {"mean_incorrect", r.mean_incorrect},
                          {"note", r.note}};
      if (r.published_si_sdr) j["published_si_sdr"] = *r.published_si_sdr;
      rs.push_back(j);
    }
    return {{"suite", to_string(suite)},
            {"rows", rs},
            {"published_order", published_order},
            {"measured_order", measured_order},
            {"pairwise_agreement", pairwise_agreement},
            {"ordering_reproduced", ordering_reproduced}};
  }
};

struct AblationOptions {
  TrainConfig train;                     // base training setup; network fields are overridden per row
  std::vector<uint64_t> seeds = {1, 2, 3};
  SyntheticData test;                    // held-out evaluation mixtures
  int finetune_epochs = 0;               // MM_VARIANTS; 0 uses train.max_epochs / 2
  IncorrectSegmentOptions incorrect;
  std::function<void(const std::string&)> progress;
  std::vector<std::string> only;         // when non-empty, run just these labels

  AblationOptions() {
    train.network = NetworkConfig::tiny();
    train.output_dir.clear();
    test.count = 40;
    test.seed = 50000;
  }
};

namespace detail {

inline AblationEntry entry(const std::string& label, NetworkConfig c, Variant v, double pub, std::string note = {}) {
  c.variant = v;
  AblationEntry a;
  a.label = label;
  a.network = c;
  a.published_si_sdr = pub;
  a.note = std::move(note);
  return a;
}

}  // namespace detail

/// Rows of a suite (suite order) and its published ranking (best first).
inline std::pair<std::vector<AblationEntry>, std::vector<std::string>> ablation_entries(AblationSuite suite,
                                                                                        const NetworkConfig& base) {
  using detail::entry;
  std::vector<AblationEntry> e;
  std::vector<std::string> order;
  switch (suite) {
    case AblationSuite::kTableV:
      e = {entry("AV-DPRNN", base, Variant::kAvDprnn, 10.24), entry("S1", base, Variant::kS1, 12.18),
           entry("S2", base, Variant::kS2, 12.51),            entry("S3", base, Variant::kS3, 12.71),
           entry("S4", base, Variant::kS4, 12.75),            entry("SEANET", base, Variant::kSeanet, 13.08)};
      order = {"SEANET", "S4", "S3", "S2", "S1", "AV-DPRNN"};
      break;
    case AblationSuite::kAlphaBetaGamma:
      e = {entry("SEANET", base, Variant::kSeanet, 13.08),
           entry("SEANET-alpha", base, Variant::kAlpha, 10.57, "no extractor/suppressor"),
           entry("SEANET-beta", base, Variant::kBeta, 12.69, "no noise-noise self-attention"),
           entry("SEANET-gamma", base, Variant::kGamma, 12.98, "subtraction before softmax")};
      order = {"SEANET", "SEANET-gamma", "SEANET-beta", "SEANET-alpha"};
      break;
    case AblationSuite::kScenarios: {
      // Both networks are trained once on all scenarios and scored per
      // scenario; reference values are published SI-SDRi.
      const std::vector<std::tuple<Scenario, const char*, double, double>> sc = {
          {Scenario::kS, "S", 10.49, 13.26},
          {Scenario::kSN, "S+N", 9.86, 12.31},
          {Scenario::kSS, "S+S", 9.95, 12.41},
          {Scenario::kSSN, "S+S+N", 9.71, 11.98}};
      std::vector<std::pair<double, std::string>> pub;
      for (const auto& [s, name, dprnn, seanet] : sc) {
        for (auto [label, v, ref] : {std::tuple{"AV-DPRNN", Variant::kAvDprnn, dprnn},
                                     std::tuple{"SEANET", Variant::kSeanet, seanet}}) {
          AblationEntry a = entry(std::string(label) + " " + name, base, v, ref, "published value is SI-SDRi");
          a.eval_scenario = s;
          a.train_key = label;
          e.push_back(a);
          pub.emplace_back(ref, a.label);
        }
      }
      std::stable_sort(pub.begin(), pub.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
      for (const auto& p : pub) order.push_back(p.second);
      break;
    }
    case AblationSuite::kMmVariants: {
      e = {entry("SEANET", base, Variant::kSeanet, 13.08)};
      for (auto [mm, label, pub] : {std::tuple{MultimodalVariant::kFusion, "F-SEANET", 13.63},
                                    std::tuple{MultimodalVariant::kPsnl, "P-SEANET", 13.36},
                                    std::tuple{MultimodalVariant::kContrastive, "A-SEANET", 13.51}}) {
        AblationEntry a = entry(label, base, Variant::kSeanet, pub, "fine-tuned from SEANET");
        a.network.mm_variant = mm;
        a.finetune_from_base = true;
        e.push_back(a);
      }
      order = {"F-SEANET", "A-SEANET", "P-SEANET", "SEANET"};
      break;
    }
    case AblationSuite::kBetaSweep:
      for (double b : {0.0, 0.05, 0.1, 0.2, 0.5, 1.0}) {
        std::ostringstream label;
        label << "beta=" << b;
        AblationEntry a = entry(label.str(), base, Variant::kSeanet, 0.0,
                                b == 0.0 ? "AV-DPRNN-equivalent weighting" : "");
        a.published_si_sdr.reset();
        a.network.beta = b;
        e.push_back(a);
      }
      order = {"beta=0.1"};  // published optimum; remaining order unreported
      break;
  }
  return {e, order};
}

/// Fills measured_order, pairwise_agreement and ordering_reproduced from
/// the row means.
inline void rank_table(AblationTable& t) {
  std::vector<const AblationRow*> ranked;
  for (const auto& r : t.rows) ranked.push_back(&r);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const AblationRow* a, const AblationRow* b) { return a->mean_si_sdri > b->mean_si_sdri; });
  t.measured_order.clear();
  for (const AblationRow* r : ranked) t.measured_order.push_back(r->label);
  const auto& p = t.published_order;
  if (p.size() == 1) {
    t.ordering_reproduced = !t.measured_order.empty() && t.measured_order.front() == p.front();
    t.pairwise_agreement = t.ordering_reproduced ? 1.0 : 0.0;
    return;
  }
  int agree = 0, pairs = 0;
  for (size_t i = 0; i < p.size(); ++i)
    for (size_t j = i + 1; j < p.size(); ++j) {
      ++pairs;
      if (t.row(p[i]).mean_si_sdri > t.row(p[j]).mean_si_sdri) ++agree;
    }
  t.pairwise_agreement = pairs ? static_cast<double>(agree) / pairs : 0.0;
  t.ordering_reproduced = pairs > 0 && agree == pairs;
}

/// Trains every row of `suite` for every seed and scores it on the test
/// set. All rows see the same training, validation and test mixtures.
inline AblationTable run_ablation(AblationSuite suite, const AblationOptions& opt) {
  using Net = Trainer<float>;
  auto [entries, order] = ablation_entries(suite, opt.train.network);
  if (!opt.only.empty()) {
    std::vector<AblationEntry> kept;
    for (size_t i = 0; i < entries.size(); ++i)
      if ((i == 0 && suite == AblationSuite::kMmVariants) ||
          std::find(opt.only.begin(), opt.only.end(), entries[i].label) != opt.only.end())
        kept.push_back(entries[i]);
    std::vector<std::string> kept_order;
    for (const auto& l : order)
      if (std::any_of(kept.begin(), kept.end(), [&](const AblationEntry& e) { return e.label == l; }))
        kept_order.push_back(l);
    entries = std::move(kept);
    order = std::move(kept_order);
  }
  AblationTable table;
  table.suite = suite;
  table.published_order = order;

  const std::vector<MixtureSample> train = load_mixtures(opt.train.train_data);
  const std::vector<MixtureSample> val = load_mixtures(opt.train.val_data);
  SyntheticData test_spec = opt.test;
  if (suite == AblationSuite::kScenarios)
    test_spec.scenarios = {Scenario::kS, Scenario::kSN, Scenario::kSS, Scenario::kSSN};
  DataSpec ts;
  ts.synthetic = test_spec;
  const std::vector<MixtureSample> test = load_mixtures(ts);

  std::map<std::pair<std::string, uint64_t>, std::unique_ptr<Net>> trained;
  auto say = [&](const std::string& m) {
    if (opt.progress) opt.progress(m);
  };

  for (const auto& en : entries) {
    AblationRow row;
    row.label = en.label;
    row.published_si_sdr = en.published_si_sdr;
    row.note = en.note;
    const std::string key = en.train_key.empty() ? en.label : en.train_key;
    std::vector<MixtureSample> subset;
    for (const auto& m : test)
      if (!en.eval_scenario || m.scenario == *en.eval_scenario) subset.push_back(m);
    for (uint64_t seed : opt.seeds) {
      auto it = trained.find({key, seed});
      if (it == trained.end()) {
        TrainConfig tc = opt.train;
        tc.network = en.network;
        tc.network.seed = seed;
        tc.seed = seed;
        tc.output_dir.clear();
        if (en.finetune_from_base) tc.max_epochs = opt.finetune_epochs > 0 ? opt.finetune_epochs
                                                                           : std::max(1, opt.train.max_epochs / 2);
        auto t = std::make_unique<Net>(tc);
        t->set_restore_best(true);
        if (en.finetune_from_base) {
          auto base = trained.find({entries.front().label, seed});
          if (base == trained.end()) throw std::logic_error("ablation: fine-tuned row needs the base row first");
          t->network().load_matching(base->second->network().parameters());
        }
        say(to_string(suite) + ": training " + key + " (seed " + std::to_string(seed) + ")");
        t->fit(train, val);
        it = trained.emplace(std::make_pair(key, seed), std::move(t)).first;
      }
      EvalOptions eo;
      eo.incorrect = opt.incorrect;
      MetricsReport rep = evaluate(network_extractor(it->second->network()), subset, eo);
      row.seed_si_sdri.push_back(rep.mean_si_sdri);
      row.mean_si_sdri += rep.mean_si_sdri / opt.seeds.size();
      row.mean_sdri += rep.mean_sdri / opt.seeds.size();
      row.mean_si_sdr += rep.mean_si_sdr / opt.seeds.size();
      row.mean_incorrect += static_cast<double>(rep.total_incorrect_segments) / opt.seeds.size();
      std::ostringstream m;
      m << std::fixed << std::setprecision(2) << to_string(suite) << ": " << en.label << " seed " << seed
        << " SI-SDRi " << rep.mean_si_sdri << " dB";
      say(m.str());
    }
    table.rows.push_back(row);
  }
  rank_table(table);
  return table;
}

}  // namespace seanet

#endif  // SEANET_TRAIN_ABLATION_HPP_
