// Copyright 2026 The seanet-cpp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <iterator>

#include "test_util.hpp"

namespace seanet {
namespace {

using testing::oracle_sdr;
using testing::oracle_si_sdr;

TrainConfig tiny_train(uint64_t seed = 1) {
  TrainConfig c;
  c.network = NetworkConfig::tiny();
  c.network.seed = seed;
  c.seed = seed;
  c.train_data.synthetic.count = 4;
  c.train_data.synthetic.duration = 0.5;
  c.val_data.synthetic.count = 2;
  c.val_data.synthetic.duration = 0.5;
  c.segment_seconds = 0.5;
  c.batch_size = 2;
  c.max_epochs = 2;
  c.validate_every = 1;
  c.output_dir.clear();
  return c;
}

std::vector<MixtureSample> synthetic(int count, double duration, uint64_t seed) {
  DataSpec d;
  d.synthetic.count = count;
  d.synthetic.duration = duration;
  d.synthetic.seed = seed;
  return load_mixtures(d);
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(is), {});
}

// --------------------------------------------------------------------- data

TEST(Examples, LipFramesFallBackToOracleWithoutFrontEnd) {
  MixtureSample m = synthetic(1, 0.5, 5)[0];
  m.visual = render_lip_frames(m.target);
  NetworkConfig c = NetworkConfig::tiny();
  ASSERT_FALSE(c.visual_frontend);
  Example<double> ex = make_example<double>(m, c);
  EXPECT_FALSE(ex.stream.has_value());
  const Index l = encoder_frames(static_cast<Index>(m.mixture.size()), c.enc_win, c.enc_hop);
  EXPECT_EQ(ex.visual, oracle_visual_embed(m.target, l, c.visual_dim, c.enc_win, c.enc_hop));
  c.visual_frontend = true;
  EXPECT_TRUE(make_example<double>(m, c).stream.has_value());
}

// ------------------------------------------------------------------- config

TEST(TrainConfig, StepDecaySchedule) {
  TrainConfig c;
  c.decay_every = 3;
  EXPECT_DOUBLE_EQ(c.lr_at(0), 1e-3);
  EXPECT_DOUBLE_EQ(c.lr_at(2), 1e-3);
  EXPECT_DOUBLE_EQ(c.lr_at(3), 1e-3 * 0.97);
  EXPECT_NEAR(c.lr_at(6), 1e-3 * 0.97 * 0.97, 1e-18);
  c.decay_rule = DecayRule::kLinear;
  EXPECT_NEAR(c.lr_at(6), 1e-3 * (1.0 - 2 * 0.03), 1e-18);
}

TEST(TrainConfig, JsonRoundTripAndUnknownKeys) {
  TrainConfig c = tiny_train(7);
  c.lr = 5e-4;
  TrainConfig back = train_config_from_json(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
  nlohmann::json j = to_json(c);
  j["learning_rate"] = 1.0;
  try {
    train_config_from_json(j);
    FAIL() << "unknown key accepted";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("unknown key"), std::string::npos);
  }
  c.batch_size = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

// ------------------------------------------------------------------ trainer

TEST(Trainer, SameSeedGivesIdenticalLogs) {
  auto run = [] {
    Trainer<float> t(tiny_train(3));
    TrainConfig c = tiny_train(3);
    return t.fit(load_mixtures(c.train_data), load_mixtures(c.val_data)).log;
  };
  auto a = run(), b = run();
  ASSERT_EQ(a.size(), b.size());
  ASSERT_EQ(a.size(), 4u);
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].split, b[i].split);
    EXPECT_EQ(a[i].loss, b[i].loss) << i;
    EXPECT_EQ(a[i].si_sdri, b[i].si_sdri) << i;
  }
}

TEST(Trainer, OverfitsOneMixture) {
  TrainConfig c = tiny_train(4);
  c.batch_size = 1;
  c.lr = 3e-3;
  Trainer<float> t(c);
  auto train = synthetic(1, 0.5, 77);
  std::vector<Example<float>> set = make_examples<float>(train, c.network);
  const double before = t.evaluate(set).loss;
  for (int i = 0; i < 60; ++i) t.step({&set[0]}, c.lr);
  const StepStats after = t.evaluate(set);
  EXPECT_LT(after.loss, before - 5.0);
  EXPECT_GT(after.si_sdri, 2.0);
  EXPECT_EQ(t.steps(), 60);
  EXPECT_THROW(t.step({}, c.lr), std::invalid_argument);
}

TEST(Trainer, WritesArtifactsAndResumes) {
  TrainConfig c = tiny_train(5);
  c.output_dir = testing::temp_dir("resume");
  Trainer<float> t(c);
  auto train = load_mixtures(c.train_data), val = load_mixtures(c.val_data);
  TrainResult r = t.fit(train, val);
  EXPECT_EQ(r.steps, 4);
  ASSERT_FALSE(r.best_checkpoint.empty());
  EXPECT_TRUE(std::filesystem::exists(r.last_checkpoint));
  std::ifstream log(c.output_dir + "/log.jsonl");
  int lines = 0;
  for (std::string l; std::getline(log, l); ++lines) EXPECT_TRUE(nlohmann::json::parse(l).contains("loss"));
  EXPECT_EQ(lines, static_cast<int>(r.log.size()));

  Trainer<float> u(c);
  u.resume(r.last_checkpoint);
  EXPECT_EQ(u.steps(), 4);
  for (const auto& e : t.network().parameters().entries())
    EXPECT_EQ(u.network().parameters().at(e.name).value(), e.var.value()) << e.name;
  // Continuing both trainers from the same state gives the same step.
  auto set = make_examples<float>(synthetic(1, 0.5, 31), c.network);
  EXPECT_EQ(t.step({&set[0]}, 1e-3).loss, u.step({&set[0]}, 1e-3).loss);
  for (const auto& e : t.network().parameters().entries())
    EXPECT_EQ(u.network().parameters().at(e.name).value(), e.var.value()) << e.name;
}

TEST(Trainer, MaxStepsStopsEarly) {
  TrainConfig c = tiny_train(6);
  c.max_epochs = 50;
  c.max_steps = 3;
  Trainer<float> t(c);
  TrainResult r = t.fit(load_mixtures(c.train_data), load_mixtures(c.val_data));
  EXPECT_EQ(r.steps, 3);
  EXPECT_EQ(r.log.back().split, "val");
}

// --------------------------------------------------------------- checkpoint

TEST(Checkpoint, RoundTripIsBitExactOnProbe) {
  TrainConfig c = tiny_train(8);
  const std::string dir = testing::temp_dir("ckpt");
  Trainer<float> t(c);
  auto set = make_examples<float>(synthetic(2, 0.5, 40), c.network);
  t.step({&set[0], &set[1]}, 1e-3);
  t.save(dir + "/a.ckpt", 1);
  auto net = load_network<float>(dir + "/a.ckpt");
  NoGradGuard g;
  Matrix<float> x = set[0].mixture;
  Matrix<float> ya = t.network().forward(Var<float>(x), Var<float>(set[0].visual)).estimate().value();
  Matrix<float> yb = net->forward(Var<float>(x), Var<float>(set[0].visual)).estimate().value();
  EXPECT_EQ(ya, yb);
  Checkpoint<float> ck = load_checkpoint<float>(dir + "/a.ckpt");
  EXPECT_EQ(ck.meta.at("step").get<long long>(), 1);
  EXPECT_EQ(ck.adam_m.size(), t.network().parameters().entries().size());
}

TEST(Checkpoint, RejectsCorruptFile) {
  const std::string dir = testing::temp_dir("corrupt");
  std::ofstream(dir + "/bad.ckpt") << "not a checkpoint";
  EXPECT_ANY_THROW(load_checkpoint<float>(dir + "/bad.ckpt"));
  EXPECT_ANY_THROW(load_checkpoint<float>(dir + "/missing.ckpt"));
}

// --------------------------------------------------------------- evaluation

TEST(Evaluate, PassThroughStubScoresZeroImprovement) {
  auto items = synthetic(6, 0.6, 500);
  MetricsReport rep = evaluate([](const MixtureSample& m) { return m.mixture; }, items);
  ASSERT_EQ(rep.rows.size(), 6u);
  for (const auto& r : rep.rows) {
    EXPECT_EQ(r.si_sdri, 0.0);
    EXPECT_EQ(r.sdri, 0.0);
  }
  EXPECT_EQ(rep.mean_si_sdri, 0.0);
  EXPECT_EQ(rep.failures, 0);
}

TEST(Evaluate, TargetStubScoresFlooredMaximum) {
  auto items = synthetic(4, 0.6, 600);
  MetricsReport rep = evaluate([](const MixtureSample& m) { return m.target; }, items);
  for (size_t i = 0; i < items.size(); ++i) {
    const auto& m = items[i];
    const double rr = m.target.energy();
    const double a = rr / (rr + 1e-12);
    const double best = 10.0 * std::log10(a * a * rr / 1e-12);
    const double want = best - oracle_si_sdr(m.mixture.samples, m.target.samples);
    EXPECT_NEAR(rep.rows[i].si_sdri, want, 1e-6) << m.id;
    EXPECT_NEAR(rep.rows[i].sdri, 10.0 * std::log10(rr / 1e-12) -
                                      oracle_sdr(m.mixture.samples, m.target.samples), 1e-6);
    EXPECT_EQ(rep.rows[i].incorrect_segments, 0);
  }
}

TEST(Evaluate, MeansAreRecomputedAndErrorsExcluded) {
  auto items = synthetic(5, 0.6, 700);
  int calls = 0;
  MetricsReport rep = evaluate(
      [&](const MixtureSample& m) {
        if (++calls == 3) throw std::runtime_error("stub failure");
        Waveform w = m.mixture;
        for (size_t i = 0; i < w.size(); ++i) w.samples[i] = 0.5 * (w.samples[i] + m.target.samples[i]);
        return w;
      },
      items);
  EXPECT_EQ(rep.failures, 1);
  EXPECT_EQ(rep.rows[2].error, "stub failure");
  double sum = 0.0, sdr_sum = 0.0;
  for (size_t i = 0; i < items.size(); ++i) {
    if (i == 2) continue;
    Waveform w = items[i].mixture;
    for (size_t k = 0; k < w.size(); ++k) w.samples[k] = 0.5 * (w.samples[k] + items[i].target.samples[k]);
    sum += oracle_si_sdr(w.samples, items[i].target.samples) -
           oracle_si_sdr(items[i].mixture.samples, items[i].target.samples);
    sdr_sum += oracle_sdr(w.samples, items[i].target.samples);
  }
  EXPECT_NEAR(rep.mean_si_sdri, sum / 4, 1e-9);
  EXPECT_NEAR(rep.mean_sdr, sdr_sum / 4, 1e-9);
  MetricsReport back = report_from_json(to_json(rep));
  EXPECT_NEAR(back.mean_si_sdri, rep.mean_si_sdri, 1e-12);
  EXPECT_EQ(back.failures, 1);
}

TEST(Evaluate, MissingManifestFileBecomesErrorRow) {
  const std::string dir = testing::temp_dir("manifest");
  auto m = synthetic(1, 0.5, 800)[0];
  write_wav(dir + "/mix.wav", m.mixture);
  write_wav(dir + "/s.wav", m.target);
  write_wav(dir + "/n.wav", m.noise);
  ManifestRecord good{"good", "mix.wav", "s.wav", "n.wav", std::nullopt, Scenario::kSN, 0.0};
  ManifestRecord bad = good;
  bad.id = "bad";
  bad.target_path = "absent.wav";
  write_manifest(dir + "/m.jsonl", {good, bad});
  MetricsReport rep = evaluate_manifest([](const MixtureSample& x) { return x.mixture; }, dir + "/m.jsonl");
  ASSERT_EQ(rep.rows.size(), 2u);
  EXPECT_TRUE(rep.rows[0].error.empty());
  EXPECT_EQ(rep.rows[1].id, "bad");
  EXPECT_FALSE(rep.rows[1].error.empty());
  EXPECT_EQ(rep.failures, 1);
}

TEST(Evaluate, NetworkEvaluationLeavesCheckpointUntouched) {
  TrainConfig c = tiny_train(9);
  const std::string dir = testing::temp_dir("sidefx");
  Trainer<float> t(c);
  t.save(dir + "/m.ckpt", 0);
  const std::string before = read_file(dir + "/m.ckpt");
  const auto stamp = std::filesystem::last_write_time(dir + "/m.ckpt");
  auto net = load_network<float>(dir + "/m.ckpt");
  MetricsReport rep = evaluate(network_extractor(*net), synthetic(2, 0.5, 900));
  EXPECT_EQ(rep.failures, 0);
  EXPECT_EQ(read_file(dir + "/m.ckpt"), before);
  EXPECT_EQ(std::filesystem::last_write_time(dir + "/m.ckpt"), stamp);
  // The extractor is pure: scoring twice gives identical reports.
  MetricsReport again = evaluate(network_extractor(*net), synthetic(2, 0.5, 900));
  EXPECT_EQ(rep.mean_si_sdri, again.mean_si_sdri);
}

// ------------------------------------------------------------------- plots

TEST(Plots, OneItemGivesTriptychAndChart) {
  const std::string dir = testing::temp_dir("plots");
  auto m = synthetic(1, 0.5, 1000)[0];
  MetricsReport rep = evaluate([](const MixtureSample& x) { return x.mixture; }, {m});
  PlotResult p = emit_plots(rep, {{m.id, m.mixture, m.mixture, m.target}}, dir);
  ASSERT_EQ(p.images.size(), 2u);
  for (const auto& f : p.images) EXPECT_TRUE(std::filesystem::exists(f)) << f;
  EXPECT_TRUE(std::filesystem::exists(p.table));
  EXPECT_EQ(p.warnings.empty(), png_available());
}

TEST(Plots, EmptyReportWritesNothing) {
  const std::string dir = testing::temp_dir("plots_empty") + "/out";
  PlotResult p = emit_plots(MetricsReport{}, {}, dir);
  EXPECT_TRUE(p.images.empty());
  ASSERT_EQ(p.warnings.size(), 1u);
  EXPECT_EQ(p.warnings[0], "report has no rows; no plots written");
  EXPECT_FALSE(std::filesystem::exists(dir));
}

TEST(Plots, ToneEnergySitsInItsMelBand) {
  Waveform w;
  w.samples.resize(16000);
  for (size_t i = 0; i < w.size(); ++i) w.samples[i] = 0.5 * std::sin(2 * std::numbers::pi * 1000.0 * i / 16000.0);
  Matrix<double> lm = log_mel_spectrogram(w, 64);
  Eigen::Index band;
  lm.colwise().mean().maxCoeff(&band);
  // Peak of the winning triangle, in Hz.
  Matrix<double> fb = mel_filterbank(64, 512, 16000, 50.0, 8000.0);
  Eigen::Index bin;
  fb.row(band).maxCoeff(&bin);
  EXPECT_NEAR(bin * 16000.0 / 512, 1000.0, 60.0);
  Image img = triptych(w, w, w, 64);
  EXPECT_GT(img.width, 0);
  EXPECT_GT(img.height, 0);
}

// ----------------------------------------------------------------- ablation

TEST(Ablation, SuiteRowsAndNotes) {
  auto [rows, order] = ablation_entries(AblationSuite::kTableV, NetworkConfig::tiny());
  std::vector<std::string> labels;
  for (const auto& e : rows) labels.push_back(e.label);
  EXPECT_EQ(labels, (std::vector<std::string>{"AV-DPRNN", "S1", "S2", "S3", "S4", "SEANET"}));
  EXPECT_EQ(order.front(), "SEANET");
  EXPECT_EQ(rows[0].network.variant, Variant::kAvDprnn);
  EXPECT_EQ(rows[5].network.variant, Variant::kSeanet);
  auto [beta, border] = ablation_entries(AblationSuite::kBetaSweep, NetworkConfig::tiny());
  ASSERT_FALSE(beta.empty());
  EXPECT_EQ(beta[0].network.beta, 0.0);
  EXPECT_EQ(beta[0].note, "AV-DPRNN-equivalent weighting");
  auto [mm, mo] = ablation_entries(AblationSuite::kMmVariants, NetworkConfig::tiny());
  EXPECT_EQ(mm.size(), 4u);
  for (size_t i = 1; i < mm.size(); ++i) EXPECT_TRUE(mm[i].finetune_from_base);
  EXPECT_EQ(parse_ablation_suite(to_string(AblationSuite::kScenarios)), AblationSuite::kScenarios);
}

TEST(Ablation, RankingAgreement) {
  AblationTable t;
  t.published_order = {"A", "B", "C"};
  for (auto [l, v] : {std::pair{"A", 3.0}, {"B", 1.0}, {"C", 2.0}}) {
    AblationRow r;
    r.label = l;
    r.mean_si_sdri = v;
    t.rows.push_back(r);
  }
  rank_table(t);
  EXPECT_EQ(t.measured_order, (std::vector<std::string>{"A", "C", "B"}));
  EXPECT_NEAR(t.pairwise_agreement, 2.0 / 3.0, 1e-12);
  EXPECT_FALSE(t.ordering_reproduced);
  EXPECT_THROW(t.row("D"), std::out_of_range);
}

TEST(Ablation, SameSeedTableIsBitIdentical) {
  AblationOptions o;
  o.train = tiny_train(1);
  o.train.max_epochs = 1;
  o.train.max_steps = 1;
  o.seeds = {1};
  o.test.count = 2;
  o.test.duration = 0.5;
  o.only = {"AV-DPRNN", "SEANET"};
  const std::string a = run_ablation(AblationSuite::kTableV, o).to_json().dump();
  const std::string b = run_ablation(AblationSuite::kTableV, o).to_json().dump();
  EXPECT_EQ(a, b);
  AblationTable t = run_ablation(AblationSuite::kTableV, o);
  EXPECT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.row("SEANET").seed_si_sdri.size(), 1u);
}

}  // namespace
}  // namespace seanet
