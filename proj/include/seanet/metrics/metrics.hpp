// Copyright 2026 The seanet-cpp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Reference-quality metrics. Log-ratio denominators carry an epsilon of
// 1e-12, which keeps perfect estimates finite (about +120 dB for
// unit-energy signals). A zero numerator is floored to the same epsilon.

#ifndef SEANET_METRICS_METRICS_HPP_
#define SEANET_METRICS_METRICS_HPP_

#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "seanet/signal/audio.hpp"

namespace seanet {

inline constexpr double kMetricEps = 1e-12;

namespace detail {

// Exact for positive energies so that scaling the estimate cancels.
inline double numerator_floor(double e) { return e > 0.0 ? e : kMetricEps; }

struct SiSdrTerms {
  double alpha = 0.0;        // <est, ref> / (|ref|^2 + eps)
  double target_energy = 0;  // |alpha ref|^2
  double residual_energy = 0;  // |est - alpha ref|^2
  double value = 0.0;        // dB
};

template <typename T>
SiSdrTerms si_sdr_terms(const T* est, const T* ref, size_t n) {
  double dot = 0.0, rr = 0.0;
  for (size_t i = 0; i < n; ++i) {
    dot += double(est[i]) * double(ref[i]);
    rr += double(ref[i]) * double(ref[i]);
  }
  SiSdrTerms t;
  t.alpha = dot / (rr + kMetricEps);
  t.target_energy = t.alpha * t.alpha * rr;
  double res = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double d = double(est[i]) - t.alpha * double(ref[i]);
    res += d * d;
  }
  t.residual_energy = res;
  t.value = 10.0 * std::log10(numerator_floor(t.target_energy) / (res + kMetricEps));
  return t;
}

template <typename T>
double sdr_value(const T* est, const T* ref, size_t n) {
  double rr = 0.0, dd = 0.0;
  for (size_t i = 0; i < n; ++i) {
    rr += double(ref[i]) * double(ref[i]);
    const double d = double(est[i]) - double(ref[i]);
    dd += d * d;
  }
  return 10.0 * std::log10(numerator_floor(rr) / (dd + kMetricEps));
}

template <typename T>
void check_pair(std::span<const T> est, std::span<const T> ref, const char* what) {
  if (est.size() != ref.size())
    throw std::invalid_argument(std::string(what) + ": length mismatch (" +
                                std::to_string(est.size()) + " vs " + std::to_string(ref.size()) + ")");
  if (ref.empty()) throw std::invalid_argument(std::string(what) + ": empty input");
  double rr = 0.0;
  for (T v : ref) rr += double(v) * double(v);
  if (rr <= 0.0) throw std::invalid_argument(std::string(what) + ": reference has zero energy");
}

}  // namespace detail

/// Scale-invariant SDR in dB. Not symmetric in its arguments.
template <typename T>
double si_sdr(std::span<const T> est, std::span<const T> ref) {
  detail::check_pair(est, ref, "si_sdr");
  return detail::si_sdr_terms(est.data(), ref.data(), est.size()).value;
}

inline double si_sdr(const Waveform& est, const Waveform& ref) {
  return si_sdr<double>(est.samples, ref.samples);
}

/// Negative SI-SDR, the training objective l(est, ref).
template <typename T>
double si_sdr_loss(std::span<const T> est, std::span<const T> ref) {
  return -si_sdr<T>(est, ref);
}

inline double si_sdr_loss(const Waveform& est, const Waveform& ref) { return -si_sdr(est, ref); }

/// Energy-ratio SDR: 10 log10(|ref|^2 / |est - ref|^2).
template <typename T>
double sdr(std::span<const T> est, std::span<const T> ref) {
  detail::check_pair(est, ref, "sdr");
  return detail::sdr_value(est.data(), ref.data(), est.size());
}

inline double sdr(const Waveform& est, const Waveform& ref) { return sdr<double>(est.samples, ref.samples); }

using MetricFn = std::function<double(const Waveform&, const Waveform&)>;

/// metric(est, ref) - metric(mixture, ref).
inline double improvement(const MetricFn& metric, const Waveform& est, const Waveform& mixture,
                          const Waveform& ref) {
  if (mixture.size() != ref.size()) throw std::invalid_argument("improvement: mixture length mismatch");
  return metric(est, ref) - metric(mixture, ref);
}

/// How the incorrect-extraction rule compares segment scores.
enum class IncorrectRule {
  kSimilarity,   // incorrect when SI-SDR(est, s) < SI-SDR(est, n) - mu
  kLiteralLoss,  // incorrect when l(est, s) < l(est, n) - mu, l = -SI-SDR
};

/// Counts full segments of `segment_len_s` seconds whose estimate is closer
/// to the noise than to the target. The trailing partial segment is dropped.
inline int count_incorrect_segments(const Waveform& est, const Waveform& s, const Waveform& n,
                                    double segment_len_s, double mu,
                                    IncorrectRule rule = IncorrectRule::kSimilarity) {
  check_compatible(est, s, "count_incorrect_segments");
  check_compatible(est, n, "count_incorrect_segments");
  if (!(segment_len_s > 0.0)) throw std::invalid_argument("count_incorrect_segments: segment length must be positive");
  const size_t seg = static_cast<size_t>(std::llround(segment_len_s * est.sample_rate));
  if (seg < 2) throw std::invalid_argument("count_incorrect_segments: segment shorter than 2 samples");
  int count = 0;
  for (size_t start = 0; start + seg <= est.size(); start += seg) {
    const double* e = est.samples.data() + start;
    const double to_target = detail::si_sdr_terms(e, s.samples.data() + start, seg).value;
    const double to_noise = detail::si_sdr_terms(e, n.samples.data() + start, seg).value;
    const bool bad = rule == IncorrectRule::kSimilarity ? to_target < to_noise - mu
                                                        : -to_target < -to_noise - mu;
    if (bad) ++count;
  }
  return count;
}

struct MetricsRow {
  std::string id;
  double si_sdr = 0.0;
  double sdr = 0.0;
  double si_sdri = 0.0;
  double sdri = 0.0;
  int incorrect_segments = 0;
  std::string error;  // non-empty when the item could not be scored
};

struct MetricsReport {
  std::vector<MetricsRow> rows;
  double mean_si_sdr = 0.0;
  double mean_sdr = 0.0;
  double mean_si_sdri = 0.0;
  double mean_sdri = 0.0;
  int total_incorrect_segments = 0;
  int failures = 0;

  /// Recomputes the aggregates from rows without errors.
  void finalize() {
    mean_si_sdr = mean_sdr = mean_si_sdri = mean_sdri = 0.0;
    total_incorrect_segments = 0;
    failures = 0;
    int ok = 0;
    for (const auto& r : rows) {
      if (!r.error.empty()) {
        ++failures;
        continue;
      }
      ++ok;
      mean_si_sdr += r.si_sdr;
      mean_sdr += r.sdr;
      mean_si_sdri += r.si_sdri;
      mean_sdri += r.sdri;
      total_incorrect_segments += r.incorrect_segments;
    }
    if (ok > 0) {
      mean_si_sdr /= ok;
      mean_sdr /= ok;
      mean_si_sdri /= ok;
      mean_sdri /= ok;
    }
  }
};

struct IncorrectSegmentOptions {
  double segment_len_s = 0.5;
  double mu_db = 1.0;
  IncorrectRule rule = IncorrectRule::kSimilarity;
};

/// Scores one estimate against its mixture, target and noise.
inline MetricsRow score_utterance(const std::string& id, const Waveform& est, const Waveform& mixture,
                                  const Waveform& target, const Waveform& noise,
                                  const IncorrectSegmentOptions& opts = {}) {
  MetricsRow r;
  r.id = id;
  r.si_sdr = si_sdr(est, target);
  r.sdr = sdr(est, target);
  r.si_sdri = r.si_sdr - si_sdr(mixture, target);
  r.sdri = r.sdr - sdr(mixture, target);
  if (est.duration() >= opts.segment_len_s)
    r.incorrect_segments = count_incorrect_segments(est, target, noise, opts.segment_len_s, opts.mu_db, opts.rule);
  return r;
}

}  // namespace seanet

#endif  // SEANET_METRICS_METRICS_HPP_
