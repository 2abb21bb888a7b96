// Copyright 2026 The seanet-cpp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SEANET_TRAIN_OPTIMIZER_HPP_
#define SEANET_TRAIN_OPTIMIZER_HPP_

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "seanet/core/parameters.hpp"

namespace seanet {

/// Global L2 norm of all trainable gradients (missing gradients count as 0).
template <typename T>
double grad_norm(const ParameterStore<T>& store) {
  double s = 0.0;
  for (const auto& e : store.entries()) {
    if (!e.trainable || !e.var.node()->has_grad()) continue;
    s += e.var.grad().template cast<double>().squaredNorm();
  }
  return std::sqrt(s);
}

/// Scales every gradient so the global norm is at most `max_norm`; returns
/// the norm before clipping.
template <typename T>
double clip_grad_norm(ParameterStore<T>& store, double max_norm) {
  const double n = grad_norm(store);
  if (max_norm > 0.0 && n > max_norm) {
    const T f = static_cast<T>(max_norm / (n + 1e-12));
    for (auto& e : store.entries())
      if (e.trainable && e.var.node()->has_grad()) e.var.node()->grad *= f;
  }
  return n;
}

template <typename T>
class Adam {
 public:
  struct Options {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
  };

  Adam() = default;
  Adam(const ParameterStore<T>& store, Options o) : opt_(o) {
    for (const auto& e : store.entries()) {
      m_.push_back(Matrix<T>::Zero(e.var.rows(), e.var.cols()));
      v_.push_back(Matrix<T>::Zero(e.var.rows(), e.var.cols()));
    }
  }

  /// One update over every trainable parameter with a gradient.
  void step(ParameterStore<T>& store, double lr) {
    auto& entries = store.entries();
    if (entries.size() != m_.size()) throw std::logic_error("Adam: parameter set changed since construction");
    ++t_;
    const double bc1 = 1.0 - std::pow(opt_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(opt_.beta2, static_cast<double>(t_));
    const T b1 = static_cast<T>(opt_.beta1), b2 = static_cast<T>(opt_.beta2);
    const T step = static_cast<T>(lr / bc1);
    const T inv_bc2 = static_cast<T>(1.0 / bc2);
    const T eps = static_cast<T>(opt_.eps);
    for (size_t i = 0; i < entries.size(); ++i) {
      auto& e = entries[i];
      if (!e.trainable || !e.var.node()->has_grad()) continue;
      const Matrix<T>& g = e.var.grad();
      m_[i] = b1 * m_[i] + (T(1) - b1) * g;
      v_[i] = b2 * v_[i] + (T(1) - b2) * g.cwiseProduct(g);
      e.var.mutable_value().array() -= step * m_[i].array() / ((v_[i].array() * inv_bc2).sqrt() + eps);
    }
  }

  long long steps() const { return t_; }
  void set_steps(long long t) { t_ = t; }
  std::vector<Matrix<T>>& first_moments() { return m_; }
  std::vector<Matrix<T>>& second_moments() { return v_; }
  const std::vector<Matrix<T>>& first_moments() const { return m_; }
  const std::vector<Matrix<T>>& second_moments() const { return v_; }

 private:
  Options opt_;
  std::vector<Matrix<T>> m_, v_;
  long long t_ = 0;
};

}  // namespace seanet

#endif  // SEANET_TRAIN_OPTIMIZER_HPP_
