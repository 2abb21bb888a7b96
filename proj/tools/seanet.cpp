// Copyright 2026 The seanet-cpp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Command-line front end: data generation, training, evaluation, ablations,
// plots and parameter reports.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "seanet/seanet.hpp"

namespace fs = std::filesystem;
using namespace seanet;

namespace {

struct IncorrectArgs {
  double mu = 1.0;
  double segment = 0.5;
  bool literal = false;

  void add(CLI::App* app) {
    app->add_option("--mu", mu, "incorrect-extraction margin in dB")->capture_default_str();
    app->add_option("--segment", segment, "incorrect-extraction segment length in seconds")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_flag("--literal-loss", literal, "compare losses instead of SI-SDR values");
  }

  IncorrectSegmentOptions options() const {
    IncorrectSegmentOptions o;
    o.mu_db = mu;
    o.segment_len_s = segment;
    o.rule = literal ? IncorrectRule::kLiteralLoss : IncorrectRule::kSimilarity;
    return o;
  }
};

void print_report(const MetricsReport& rep) {
  std::cout << std::left << std::setw(28) << "id" << std::right << std::setw(10) << "SI-SDR" << std::setw(10) << "SDR"
            << std::setw(10) << "SI-SDRi" << std::setw(10) << "SDRi" << std::setw(11) << "incorrect" << "\n"
            << std::fixed << std::setprecision(2);
  for (const auto& r : rep.rows) {
    if (!r.error.empty()) {
      std::cout << std::left << std::setw(28) << r.id << "  error: " << r.error << "\n";
      continue;
    }
    std::cout << std::left << std::setw(28) << r.id << std::right << std::setw(10) << r.si_sdr << std::setw(10) << r.sdr
              << std::setw(10) << r.si_sdri << std::setw(10) << r.sdri << std::setw(11) << r.incorrect_segments << "\n";
  }
  std::cout << std::left << std::setw(28) << "mean" << std::right << std::setw(10) << rep.mean_si_sdr << std::setw(10)
            << rep.mean_sdr << std::setw(10) << rep.mean_si_sdri << std::setw(10) << rep.mean_sdri << std::setw(11)
            << rep.total_incorrect_segments << "\n";
  if (rep.failures) std::cout << rep.failures << " item(s) failed\n";
}

int finish_report(const MetricsReport& rep, const std::string& out) {
  print_report(rep);
  if (!out.empty()) {
    write_report(out, rep);
    std::cout << "report written to " << out << "\n";
  }
  return rep.failures ? 2 : 0;
}

// ---------------------------------------------------------------------- mix

int mix_generate(const std::string& scenario, int count, double duration, uint64_t seed, const std::string& out,
                 bool visual) {
  const Scenario sc = parse_scenario(scenario);
  fs::create_directories(out);
  std::vector<ManifestRecord> recs;
  for (int i = 0; i < count; ++i) {
    MixtureSample m = generate_scenario(sc, duration, seed + static_cast<uint64_t>(i));
    ManifestRecord r;
    r.id = m.id;
    r.mixture_path = m.id + "_mix.wav";
    r.target_path = m.id + "_s.wav";
    r.noise_path = m.id + "_n.wav";
    r.scenario = m.scenario;
    r.snr_db = m.snr_db;
    write_wav(out + "/" + r.mixture_path, m.mixture);
    write_wav(out + "/" + r.target_path, m.target);
    write_wav(out + "/" + r.noise_path, m.noise);
    if (visual) {
      r.visual_path = m.id + "_lips.json";
      write_visual(out + "/" + *r.visual_path, render_lip_frames(m.target));
    }
    if (m.peak_factor != 1.0) std::cout << m.id << ": peak normalized by " << m.peak_factor << "\n";
    recs.push_back(r);
  }
  write_manifest(out + "/manifest.jsonl", recs);
  std::cout << "wrote " << count << " mixtures and " << out << "/manifest.jsonl\n";
  return 0;
}

// ------------------------------------------------------------------ metrics

int metrics_eval(const std::string& manifest, const std::string& est_dir, const IncorrectArgs& ia,
                 const std::string& out) {
  auto extract = [&](const MixtureSample& m) { return load_wav(est_dir + "/" + m.id + ".wav", m.mixture.sample_rate); };
  EvalOptions eo;
  eo.incorrect = ia.options();
  return finish_report(evaluate_manifest(extract, manifest, eo), out);
}

// -------------------------------------------------------------------- train

int train(const std::string& config, const std::string& resume, const std::string& output_dir) {
  TrainConfig cfg = load_train_config(config);
  if (!output_dir.empty()) cfg.output_dir = output_dir;
  Trainer<float> t(cfg);
  if (!resume.empty()) t.resume(resume);
  std::cout << t.network().param_report().to_text();
  t.set_callback([](const LogRecord& r) {
    std::cout << "epoch " << r.epoch << " " << r.split << " loss " << r.loss << " SI-SDRi " << r.si_sdri << " dB lr "
              << r.lr << " step " << r.step << std::endl;
  });
  try {
    TrainResult res = t.fit();
    std::cout << "best validation SI-SDRi " << res.best_val_si_sdri << " dB at epoch " << res.best_epoch << "\n";
    if (!res.best_checkpoint.empty()) std::cout << "best checkpoint " << res.best_checkpoint << "\n";
    if (!res.last_checkpoint.empty()) std::cout << "last checkpoint " << res.last_checkpoint << "\n";
  } catch (const TrainingDiverged& e) {
    std::cerr << e.what() << "\n" << e.dump().dump(2) << "\n";
    return 3;
  }
  return 0;
}

// --------------------------------------------------------------------- eval

int eval(const std::string& ckpt, const std::string& manifest, const IncorrectArgs& ia, const std::string& out,
         const std::string& est_dir) {
  auto net = load_network<float>(ckpt);
  EvalOptions eo;
  eo.incorrect = ia.options();
  if (!est_dir.empty()) {
    fs::create_directories(est_dir);
    eo.on_item = [&](const MixtureSample& m, const Waveform& est, const MetricsRow&) {
      write_wav(est_dir + "/" + m.id + ".wav", est);
    };
  }
  return finish_report(evaluate_manifest(network_extractor(*net), manifest, eo), out);
}

// ------------------------------------------------------------------- ablate

int ablate(const std::string& suite, const std::string& config, int epochs, std::vector<uint64_t> seeds,
           const std::vector<std::string>& only, const std::string& out) {
  AblationOptions o;
  if (!config.empty()) {
    o.train = load_train_config(config);
    o.train.output_dir.clear();
  }
  if (epochs > 0) o.train.max_epochs = epochs;
  if (!seeds.empty()) o.seeds = std::move(seeds);
  o.only = only;
  o.progress = [](const std::string& m) { std::cout << m << std::endl; };
  AblationTable t = run_ablation(parse_ablation_suite(suite), o);
  std::cout << t.to_text();
  if (!out.empty()) std::ofstream(out) << t.to_json().dump(2) << '\n';
  return 0;
}

// -------------------------------------------------------------------- plots

int plots(const std::string& report, const std::string& out, const std::string& manifest, const std::string& est_dir) {
  MetricsReport rep = read_report(report);
  std::vector<PlotItem> items;
  if (!manifest.empty() && !est_dir.empty()) {
    std::vector<std::pair<std::string, std::string>> errors;
    DataSpec spec;
    spec.manifest = manifest;
    for (const auto& m : load_mixtures(spec, &errors)) {
      const std::string path = est_dir + "/" + m.id + ".wav";
      if (!fs::exists(path)) continue;
      items.push_back({m.id, m.mixture, load_wav(path, m.mixture.sample_rate), m.target});
    }
  }
  PlotResult res = emit_plots(rep, items, out);
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
  for (const auto& f : res.images) std::cout << f << "\n";
  if (!res.table.empty()) std::cout << res.table << "\n";
  return 0;
}

// ------------------------------------------------------------------- params

int params(const std::string& config, const std::string& preset) {
  NetworkConfig c = preset == "tiny" ? NetworkConfig::tiny() : NetworkConfig{};
  if (!config.empty()) c = load_train_config(config).network;
  ExtractionNetwork<float> net(c);
  std::cout << "variant " << to_string(c.variant) << ", multimodal " << to_string(c.mm_variant) << "\n"
            << net.param_report().to_text();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SEANet audio-visual target speaker extraction"};
  app.require_subcommand(1);
  int status = 0;

  auto* mix = app.add_subcommand("mix", "synthetic mixture generation");
  auto* gen = mix->add_subcommand("generate", "write mixtures, sources and a manifest");
  mix->require_subcommand(1);
  std::string scenario = "S_S_N", out;
  int count = 100;
  double duration = 2.0;
  uint64_t seed = 7;
  bool visual = false;
  gen->add_option("--scenario", scenario, "S, S_N, S_S, S_S_N or N")->capture_default_str();
  gen->add_option("--count", count)->check(CLI::PositiveNumber)->capture_default_str();
  gen->add_option("--duration", duration, "seconds")->check(CLI::PositiveNumber)->capture_default_str();
  gen->add_option("--seed", seed)->capture_default_str();
  gen->add_option("--out", out, "output directory")->required();
  gen->add_flag("--visual", visual, "also write rendered lip frames");
  gen->callback([&] { status = mix_generate(scenario, count, duration, seed, out, visual); });

  auto* metrics = app.add_subcommand("metrics", "score estimates against references");
  auto* meval = metrics->add_subcommand("eval", "score <est-dir>/<id>.wav for every manifest item");
  metrics->require_subcommand(1);
  std::string manifest, est_dir, report_out;
  IncorrectArgs ia;
  meval->add_option("--manifest", manifest)->required();
  meval->add_option("--est-dir", est_dir)->required();
  meval->add_option("--out", report_out, "write the report as JSON");
  ia.add(meval);
  meval->callback([&] { status = metrics_eval(manifest, est_dir, ia, report_out); });

  auto* tr = app.add_subcommand("train", "train a network from a config file");
  std::string config, resume, output_dir;
  tr->add_option("--config", config)->required()->check(CLI::ExistingFile);
  tr->add_option("--resume", resume, "continue from a checkpoint")->check(CLI::ExistingFile);
  tr->add_option("--output-dir", output_dir, "overrides output_dir from the config");
  tr->callback([&] { status = train(config, resume, output_dir); });

  auto* ev = app.add_subcommand("eval", "evaluate a checkpoint on a manifest at full length");
  std::string ckpt, write_est;
  ev->add_option("--ckpt", ckpt)->required()->check(CLI::ExistingFile);
  ev->add_option("--manifest", manifest)->required();
  ev->add_option("--out", report_out, "write the report as JSON");
  ev->add_option("--write-estimates", write_est, "directory for estimated waveforms");
  ia.add(ev);
  ev->callback([&] { status = eval(ckpt, manifest, ia, report_out, write_est); });

  auto* ab = app.add_subcommand("ablate", "train and compare the rows of an ablation suite");
  std::string suite = "TABLE_V";
  int epochs = 0;
  std::vector<uint64_t> seeds;
  std::vector<std::string> only;
  ab->add_option("--suite", suite, "TABLE_V, ALPHA_BETA_GAMMA, SCENARIOS, MM_VARIANTS or BETA_SWEEP")
      ->capture_default_str();
  ab->add_option("--config", config, "base training config (network fields are overridden per row)");
  ab->add_option("--epochs", epochs, "override max_epochs");
  ab->add_option("--seeds", seeds)->delimiter(',');
  ab->add_option("--only", only, "run only these row labels")->delimiter(',');
  ab->add_option("--out", report_out, "write the table as JSON");
  ab->callback([&] { status = ablate(suite, config, epochs, seeds, only, report_out); });

  auto* pl = app.add_subcommand("plots", "spectrogram triptychs and summary charts from a report");
  std::string report, plot_dir = "plots";
  pl->add_option("--report", report)->required()->check(CLI::ExistingFile);
  pl->add_option("--out", plot_dir)->capture_default_str();
  pl->add_option("--manifest", manifest, "mixtures for triptychs");
  pl->add_option("--est-dir", est_dir, "estimates for triptychs");
  pl->callback([&] { status = plots(report, plot_dir, manifest, est_dir); });

  auto* pr = app.add_subcommand("params", "trainable parameter report");
  std::string preset = "default";
  pr->add_option("--config", config, "training config whose network is reported");
  pr->add_option("--preset", preset, "default or tiny")->check(CLI::IsMember({"default", "tiny"}))->capture_default_str();
  pr->callback([&] { status = params(config, preset); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return status;
}
