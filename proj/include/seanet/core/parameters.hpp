// Copyright 2026 The seanet-cpp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SEANET_CORE_PARAMETERS_HPP_
#define SEANET_CORE_PARAMETERS_HPP_

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "seanet/core/tensor.hpp"

namespace seanet {

enum class Init { kZeros, kOnes, kXavier, kOrthogonal, kConstant };

/// Owns every trainable array of a network under a hierarchical name
/// ("psnl.2.extractor.intra.lstm_fwd.w_ih"). Insertion order is stable and
/// is the order used by checkpoints and optimizers.
template <typename T>
class ParameterStore {
 public:
  explicit ParameterStore(uint64_t seed = 0) : rng_(seed) {}

  Var<T> create(const std::string& name, Index rows, Index cols, Init init, T constant = T(0),
                bool trainable = true) {
    if (index_.count(name)) throw std::logic_error("duplicate parameter name: " + name);
    Matrix<T> m(rows, cols);
    switch (init) {
      case Init::kZeros: m.setZero(); break;
      case Init::kOnes: m.setOnes(); break;
      case Init::kConstant: m.setConstant(constant); break;
      case Init::kXavier: {
        const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<T>(dist(rng_));
        break;
      }
      case Init::kOrthogonal: m = orthogonal(rows, cols); break;
    }
    Var<T> v(std::move(m), trainable);
    index_[name] = params_.size();
    params_.push_back({name, v, trainable});
    return v;
  }

  struct Entry {
    std::string name;
    Var<T> var;
    bool trainable;
  };

  const std::vector<Entry>& entries() const { return params_; }
  std::vector<Entry>& entries() { return params_; }
  bool contains(const std::string& name) const { return index_.count(name) > 0; }
  Var<T> at(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::out_of_range("unknown parameter: " + name);
    return params_[it->second].var;
  }

  size_t trainable_count() const {
    size_t n = 0;
    for (const auto& e : params_)
      if (e.trainable) n += static_cast<size_t>(e.var.value().size());
    return n;
  }

  void zero_grad() {
    for (auto& e : params_) e.var.zero_grad();
  }

  /// Per-prefix trainable counts, grouped by the first `depth` name parts.
  std::map<std::string, size_t> breakdown(int depth = 1) const {
    std::map<std::string, size_t> out;
    for (const auto& e : params_) {
      if (!e.trainable) continue;
      std::string key;
      size_t pos = 0;
      for (int d = 0; d < depth; ++d) {
        size_t next = e.name.find('.', pos);
        if (next == std::string::npos) {
          key = e.name;
          break;
        }
        key = e.name.substr(0, next);
        pos = next + 1;
      }
      out[key] += static_cast<size_t>(e.var.value().size());
    }
    return out;
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  Matrix<T> orthogonal(Index rows, Index cols) {
    std::normal_distribution<double> dist(0.0, 1.0);
    const Index big = std::max(rows, cols), small = std::min(rows, cols);
    Eigen::MatrixXd a(big, small);
    for (Index i = 0; i < a.size(); ++i) a.data()[i] = dist(rng_);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(big, small);
    // Sign fix so the distribution is uniform over orthogonal matrices.
    Eigen::MatrixXd r = qr.matrixQR().topRows(small).template triangularView<Eigen::Upper>();
    for (Index j = 0; j < small; ++j)
      if (r(j, j) < 0) q.col(j) = -q.col(j);
    Eigen::MatrixXd out = rows >= cols ? q : Eigen::MatrixXd(q.transpose());
    return out.cast<T>();
  }

  std::vector<Entry> params_;
  std::map<std::string, size_t> index_;
  std::mt19937_64 rng_;
};

}  // namespace seanet

#endif  // SEANET_CORE_PARAMETERS_HPP_
