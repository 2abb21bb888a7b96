// Copyright 2026 The seanet-cpp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Short-time spectra and mel filterbanks shared by the oracle visual cue,
// the spectral-flatness checks and the spectrogram plots.

#ifndef SEANET_SIGNAL_SPECTRAL_HPP_
#define SEANET_SIGNAL_SPECTRAL_HPP_

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "seanet/core/tensor.hpp"
#include "seanet/signal/audio.hpp"

namespace seanet {

struct StftOptions {
  int win = 400;
  int hop = 160;
  int fft_size = 512;
};

/// Power spectrogram, (frames x fft_size/2+1). Short signals are zero padded
/// to one full window.
inline Matrix<double> power_spectrogram(const Waveform& w, const StftOptions& o = {}) {
  const size_t n = w.size();
  const size_t frames = n < static_cast<size_t>(o.win) ? 1 : (n - o.win) / o.hop + 1;
  const int bins = o.fft_size / 2 + 1;
  Matrix<double> out(static_cast<Index>(frames), bins);
  std::vector<double> window(o.win);
  for (int i = 0; i < o.win; ++i)
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / o.win);
  Eigen::FFT<double> fft;
  std::vector<double> buf(o.fft_size);
  std::vector<std::complex<double>> spec;
  for (size_t f = 0; f < frames; ++f) {
    std::fill(buf.begin(), buf.end(), 0.0);
    for (int i = 0; i < o.win; ++i) {
      const size_t src = f * o.hop + i;
      if (src < n) buf[i] = w.samples[src] * window[i];
    }
    fft.fwd(spec, buf);
    for (int b = 0; b < bins; ++b) out(static_cast<Index>(f), b) = std::norm(spec[b]);
  }
  return out;
}

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

/// Triangular mel filterbank, (bands x fft_size/2+1).
inline Matrix<double> mel_filterbank(int bands, int fft_size, int sample_rate, double fmin, double fmax) {
  const int bins = fft_size / 2 + 1;
  Matrix<double> fb = Matrix<double>::Zero(bands, bins);
  const double mlo = hz_to_mel(fmin), mhi = hz_to_mel(fmax);
  std::vector<double> edges(bands + 2);
  for (int i = 0; i < bands + 2; ++i) edges[i] = mel_to_hz(mlo + (mhi - mlo) * i / (bands + 1));
  for (int b = 0; b < bands; ++b)
    for (int k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / fft_size;
      const double lo = edges[b], mid = edges[b + 1], hi = edges[b + 2];
      double v = 0.0;
      if (f > lo && f <= mid) v = (f - lo) / (mid - lo);
      else if (f > mid && f < hi) v = (hi - f) / (hi - mid);
      fb(b, k) = v;
    }
  return fb;
}

/// Log mel spectrogram, (frames x bands).
inline Matrix<double> log_mel_spectrogram(const Waveform& w, int bands = 40, const StftOptions& o = {},
                                          double floor = 1e-10) {
  Matrix<double> p = power_spectrogram(w, o);
  Matrix<double> fb = mel_filterbank(bands, o.fft_size, w.sample_rate, 50.0, 0.5 * w.sample_rate);
  Matrix<double> mel = p * fb.transpose();
  return (mel.array() + floor).log().matrix();
}

/// Mean over frames of the spectral flatness (geometric / arithmetic mean of
/// the power spectrum, DC excluded). Frames with no energy are skipped.
inline double spectral_flatness(const Waveform& w, const StftOptions& o = {}) {
  Matrix<double> p = power_spectrogram(w, o);
  double total = 0.0;
  int used = 0;
  for (Index f = 0; f < p.rows(); ++f) {
    auto row = p.row(f).segment(1, p.cols() - 1).array() + 1e-20;
    const double am = row.mean();
    if (am < 1e-12) continue;
    const double gm = std::exp(row.log().mean());
    total += gm / am;
    ++used;
  }
  return used ? total / used : 0.0;
}

}  // namespace seanet

#endif  // SEANET_SIGNAL_SPECTRAL_HPP_
