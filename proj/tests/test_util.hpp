// Copyright 2026 The seanet-cpp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Shared helpers for the test suites: random data and a central
// finite-difference gradient oracle.

#ifndef SEANET_TESTS_TEST_UTIL_HPP_
#define SEANET_TESTS_TEST_UTIL_HPP_

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "seanet/seanet.hpp"

namespace seanet::testing {

inline Matrix<double> random_matrix(Index rows, Index cols, uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, scale);
  Matrix<double> m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
  return m;
}

inline Waveform random_waveform(size_t n, uint64_t seed, double scale = 0.3) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, scale);
  Waveform w;
  w.samples.resize(n);
  for (auto& v : w.samples) v = g(rng);
  return w;
}

/// Independent transcription of scale-invariant SDR: projection, then the
/// energy ratio, using long double accumulation.
inline double oracle_si_sdr(const std::vector<double>& est, const std::vector<double>& ref) {
  long double dot = 0, rr = 0;
  for (size_t i = 0; i < est.size(); ++i) {
    dot += static_cast<long double>(est[i]) * ref[i];
    rr += static_cast<long double>(ref[i]) * ref[i];
  }
  const long double a = dot / (rr + 1e-12L);
  long double num = 0, den = 0;
  for (size_t i = 0; i < est.size(); ++i) {
    const long double t = a * ref[i];
    num += t * t;
    den += (est[i] - t) * (est[i] - t);
  }
  return static_cast<double>(10.0L * std::log10((num > 0 ? num : 1e-12L) / (den + 1e-12L)));
}

inline double oracle_sdr(const std::vector<double>& est, const std::vector<double>& ref) {
  long double rr = 0, dd = 0;
  for (size_t i = 0; i < est.size(); ++i) {
    rr += static_cast<long double>(ref[i]) * ref[i];
    dd += static_cast<long double>(est[i] - ref[i]) * (est[i] - ref[i]);
  }
  return static_cast<double>(10.0L * std::log10((rr > 0 ? rr : 1e-12L) / (dd + 1e-12L)));
}

struct GradCheck {
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  size_t checked = 0;
};

/// Compares the analytic gradient of scalar `f` w.r.t. `x` with central
/// differences at the listed flat indices (all when empty). Relative error
/// uses max(|a|, |n|, floor) as the denominator.
inline GradCheck check_gradient(const std::function<Var<double>()>& f, Var<double> x,
                                std::vector<Index> indices = {}, double h = 1e-6, double floor = 1e-6) {
  x.zero_grad();
  backward(f());
  Matrix<double> analytic =
      x.node()->has_grad() ? x.grad() : Matrix<double>::Zero(x.rows(), x.cols()).eval();
  if (indices.empty())
    for (Index i = 0; i < x.value().size(); ++i) indices.push_back(i);
  GradCheck r;
  for (Index i : indices) {
    double& v = x.mutable_value().data()[i];
    const double keep = v;
    double fp, fm;
    {
      NoGradGuard g;
      v = keep + h;
      fp = f().item();
      v = keep - h;
      fm = f().item();
    }
    v = keep;
    const double num = (fp - fm) / (2 * h);
    const double a = analytic.data()[i];
    const double abs_err = std::abs(a - num);
    r.max_abs_error = std::max(r.max_abs_error, abs_err);
    r.max_rel_error = std::max(r.max_rel_error, abs_err / std::max({std::abs(a), std::abs(num), floor}));
    ++r.checked;
  }
  return r;
}

inline std::string temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("seanet_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p.string();
}

}  // namespace seanet::testing

#endif  // SEANET_TESTS_TEST_UTIL_HPP_
