// Copyright 2026 The seanet-cpp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Training loop: mini-batches by gradient accumulation, Adam with global
// norm clipping, step-decayed learning rate, periodic validation and
// best-by-validation checkpointing. Single-threaded and seeded, so two runs
// with the same configuration produce identical logs.

#ifndef SEANET_TRAIN_TRAINER_HPP_
#define SEANET_TRAIN_TRAINER_HPP_

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "seanet/metrics/metrics.hpp"
#include "seanet/nn/network.hpp"
#include "seanet/train/checkpoint.hpp"
#include "seanet/train/config.hpp"
#include "seanet/train/data.hpp"
#include "seanet/train/optimizer.hpp"

namespace seanet {

struct LogRecord {
  int epoch = 0;
  std::string split;  // "train" or "val"
  double loss = 0.0;
  double si_sdri = 0.0;
  double lr = 0.0;
  long long step = 0;

  nlohmann::json to_json() const {
    return {{"epoch", epoch}, {"split", split}, {"loss", loss}, {"si_sdri", si_sdri}, {"lr", lr}, {"step", step}};
  }
};

/// Thrown when a loss or gradient becomes non-finite.
class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(const std::string& what, nlohmann::json dump) : std::runtime_error(what), dump_(std::move(dump)) {}
  const nlohmann::json& dump() const { return dump_; }

 private:
  nlohmann::json dump_;
};

struct TrainResult {
  std::vector<LogRecord> log;
  double best_val_si_sdri = -1e300;
  int best_epoch = -1;
  long long steps = 0;
  std::string best_checkpoint;
  std::string last_checkpoint;
};

struct StepStats {
  double loss = 0.0;
  double si_sdri = 0.0;
  double grad_norm = 0.0;
};

template <typename T>
class Trainer {
 public:
  using Callback = std::function<void(const LogRecord&)>;

  explicit Trainer(const TrainConfig& cfg)
      : cfg_(cfg), net_(std::make_unique<ExtractionNetwork<T>>(cfg.network)), rng_(cfg.seed) {
    cfg.validate();
    adam_ = Adam<T>(net_->parameters(), {cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps});
  }

  ExtractionNetwork<T>& network() { return *net_; }
  const ExtractionNetwork<T>& network() const { return *net_; }
  const TrainConfig& config() const { return cfg_; }
  Adam<T>& optimizer() { return adam_; }
  void set_callback(Callback cb) { callback_ = std::move(cb); }
  /// When set, fit() ends with the parameters of the best validation epoch.
  void set_restore_best(bool on) { restore_best_ = on; }

  /// Loss terms and the SI-SDRi of the final estimate for one example.
  std::pair<LossTerms<T>, double> forward_loss(const Example<T>& ex) const {
    BlockOutputs<T> o = net_->forward(Var<T>(ex.mixture), visual_input(*net_, ex));
    LossTerms<T> lt = net_->loss(o, ex.target, ex.noise);
    const Matrix<T>& est = o.estimate().value();
    const size_t n = static_cast<size_t>(est.rows());
    const double gain = detail::si_sdr_terms(est.data(), ex.target.data(), n).value -
                        detail::si_sdr_terms(ex.mixture.data(), ex.target.data(), n).value;
    return {lt, gain};
  }

  /// One optimizer step on `batch`; the loss is averaged over the batch.
  StepStats step(const std::vector<const Example<T>*>& batch, double lr) {
    if (batch.empty()) throw std::invalid_argument("train step: empty batch");
    net_->parameters().zero_grad();
    StepStats st;
    const T w = T(1) / static_cast<T>(batch.size());
    std::vector<std::string> ids;
    for (const Example<T>* ex : batch) {
      ids.push_back(ex->id);
      auto [lt, gain] = forward_loss(*ex);
      const double l = lt.total.item();
      if (!std::isfinite(l)) diverged("non-finite loss", ids, l);
      Matrix<T> seed(1, 1);
      seed(0, 0) = w;
      backward(lt.total, &seed);
      st.loss += l / batch.size();
      st.si_sdri += gain / batch.size();
    }
    st.grad_norm = clip_grad_norm(net_->parameters(), cfg_.grad_clip);
    if (!std::isfinite(st.grad_norm)) diverged("non-finite gradient norm", ids, st.loss);
    adam_.step(net_->parameters(), lr);
    ++steps_;
    return st;
  }

  /// Mean loss and SI-SDRi over `set` without gradients.
  StepStats evaluate(const std::vector<Example<T>>& set) const {
    NoGradGuard guard;
    StepStats st;
    for (const auto& ex : set) {
      auto [lt, gain] = forward_loss(ex);
      st.loss += lt.total.item() / set.size();
      st.si_sdri += gain / set.size();
    }
    return st;
  }

  /// Full training run on in-memory mixtures. Writes log.jsonl, best.ckpt
  /// and last.ckpt under `cfg.output_dir` unless it is empty.
  TrainResult fit(const std::vector<MixtureSample>& train, const std::vector<MixtureSample>& val) {
    if (train.empty()) throw std::invalid_argument("train: no training mixtures");
    const bool write = !cfg_.output_dir.empty();
    std::ofstream log;
    if (write) {
      std::filesystem::create_directories(cfg_.output_dir);
      log.open(cfg_.output_dir + "/log.jsonl");
      if (!log) throw std::runtime_error("cannot write " + cfg_.output_dir + "/log.jsonl");
    }
    const std::vector<Example<T>> val_set = make_examples<T>(val, cfg_.network);
    TrainResult res;
    auto emit = [&](const LogRecord& r) {
      res.log.push_back(r);
      if (write) log << r.to_json().dump() << '\n' << std::flush;
      if (callback_) callback_(r);
    };
    std::vector<size_t> order(train.size());
    std::iota(order.begin(), order.end(), size_t{0});
    bool stop = false;
    for (int epoch = 0; epoch < cfg_.max_epochs && !stop; ++epoch) {
      const double lr = cfg_.lr_at(epoch);
      std::shuffle(order.begin(), order.end(), rng_);
      StepStats acc;
      int batches = 0;
      for (size_t b = 0; b < order.size() && !stop; b += static_cast<size_t>(cfg_.batch_size)) {
        std::vector<Example<T>> owned;
        for (size_t i = b; i < std::min(order.size(), b + cfg_.batch_size); ++i) owned.push_back(segment_of(train[order[i]]));
        std::vector<const Example<T>*> batch;
        for (const auto& e : owned) batch.push_back(&e);
        StepStats st = step(batch, lr);
        acc.loss += st.loss;
        acc.si_sdri += st.si_sdri;
        ++batches;
        if (cfg_.max_steps > 0 && steps_ >= cfg_.max_steps) stop = true;
      }
      emit({epoch, "train", acc.loss / batches, acc.si_sdri / batches, lr, steps_});
      const bool last = stop || epoch + 1 == cfg_.max_epochs;
      if (!val_set.empty() && ((epoch + 1) % cfg_.validate_every == 0 || last)) {
        StepStats v = evaluate(val_set);
        emit({epoch, "val", v.loss, v.si_sdri, lr, steps_});
        if (v.si_sdri > res.best_val_si_sdri) {
          res.best_val_si_sdri = v.si_sdri;
          res.best_epoch = epoch;
          if (restore_best_) {
            best_params_.clear();
            for (const auto& e : net_->parameters().entries()) best_params_.push_back(e.var.value());
          }
          if (write) {
            res.best_checkpoint = cfg_.output_dir + "/best.ckpt";
            save(res.best_checkpoint, epoch);
          }
        }
      }
      epoch_ = epoch + 1;
    }
    if (write) {
      res.last_checkpoint = cfg_.output_dir + "/last.ckpt";
      save(res.last_checkpoint, epoch_);
    }
    if (restore_best_ && !best_params_.empty()) {
      auto& entries = net_->parameters().entries();
      for (size_t i = 0; i < entries.size(); ++i) entries[i].var.mutable_value() = best_params_[i];
    }
    res.steps = steps_;
    return res;
  }

  /// Training run on the data described by the configuration.
  TrainResult fit() { return fit(load_mixtures(cfg_.train_data), load_mixtures(cfg_.val_data)); }

  nlohmann::json metadata(int epoch) const {
    std::ostringstream rs;
    rs << rng_;
    return {{"format", "seanet-checkpoint"},
            {"network", to_json(cfg_.network)},
            {"train", to_json(cfg_)},
            {"epoch", epoch},
            {"step", steps_},
            {"rng_state", rs.str()}};
  }

  void save(const std::string& path, int epoch) const { save_checkpoint(path, net_->parameters(), metadata(epoch), &adam_); }

  /// Restores parameters, optimizer state, step counter and RNG state.
  void resume(const std::string& path) {
    Checkpoint<T> ck = load_checkpoint<T>(path);
    apply_checkpoint(ck, net_->parameters(), true, &adam_);
    steps_ = ck.meta.value("step", 0LL);
    epoch_ = ck.meta.value("epoch", 0);
    if (ck.meta.contains("rng_state")) {
      std::istringstream rs(ck.meta["rng_state"].template get<std::string>());
      rs >> rng_;
    }
  }

  long long steps() const { return steps_; }

 private:
  /// Training crop of at most `segment_seconds`, at a seeded random offset.
  Example<T> segment_of(const MixtureSample& m) {
    const size_t len = static_cast<size_t>(std::llround(cfg_.segment_seconds * m.mixture.sample_rate));
    if (m.mixture.size() <= len) return make_example<T>(m, cfg_.network);
    std::uniform_int_distribution<size_t> off(0, m.mixture.size() - len);
    return crop_example<T>(m, cfg_.network, off(rng_), len);
  }

  [[noreturn]] void diverged(const std::string& what, const std::vector<std::string>& ids, double loss) const {
    nlohmann::json dump = {{"reason", what}, {"step", steps_}, {"batch_ids", ids}, {"loss", loss}};
    nlohmann::json norms = nlohmann::json::object();
    for (const auto& e : net_->parameters().entries())
      if (e.var.node()->has_grad()) norms[e.name] = e.var.grad().template cast<double>().norm();
    dump["grad_norms"] = norms;
    if (!cfg_.output_dir.empty()) {
      std::filesystem::create_directories(cfg_.output_dir);
      std::ofstream(cfg_.output_dir + "/divergence.json") << dump.dump(2);
    }
    std::ostringstream msg;
    msg << "training diverged at step " << steps_ << ": " << what << " (batch:";
    for (const auto& id : ids) msg << ' ' << id;
    msg << ")";
    throw TrainingDiverged(msg.str(), dump);
  }

  TrainConfig cfg_;
  std::unique_ptr<ExtractionNetwork<T>> net_;
  Adam<T> adam_;
  std::mt19937_64 rng_;
  Callback callback_;
  bool restore_best_ = false;
  std::vector<Matrix<T>> best_params_;
  long long steps_ = 0;
  int epoch_ = 0;
};

}  // namespace seanet

#endif  // SEANET_TRAIN_TRAINER_HPP_
