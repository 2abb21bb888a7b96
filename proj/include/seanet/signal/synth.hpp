// Copyright 2026 The seanet-cpp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Synthetic source bank standing in for recorded speech and background
// corpora. Every generator is a pure function of (kind, duration, seed).

#ifndef SEANET_SIGNAL_SYNTH_HPP_
#define SEANET_SIGNAL_SYNTH_HPP_

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "seanet/signal/audio.hpp"

namespace seanet {

enum class SourceKind { kSpeechlike, kTonal, kBroadbandNoise, kMusicLike };

inline std::string to_string(SourceKind k) {
  switch (k) {
    case SourceKind::kSpeechlike: return "speechlike";
    case SourceKind::kTonal: return "tonal";
    case SourceKind::kBroadbandNoise: return "broadband_noise";
    case SourceKind::kMusicLike: return "music_like";
  }
  return "unknown";
}

inline SourceKind parse_source_kind(const std::string& s) {
  if (s == "speechlike") return SourceKind::kSpeechlike;
  if (s == "tonal") return SourceKind::kTonal;
  if (s == "broadband_noise") return SourceKind::kBroadbandNoise;
  if (s == "music_like") return SourceKind::kMusicLike;
  throw std::invalid_argument("unknown source kind: " + s);
}

namespace detail {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline void normalize_peak(std::vector<double>& x, double target) {
  double p = 0.0;
  for (double v : x) p = std::max(p, std::abs(v));
  if (p > 0.0)
    for (double& v : x) v *= target / p;
}

// Raised-cosine attack/release envelope of a segment of n samples.
inline double segment_gain(size_t i, size_t n, size_t ramp) {
  ramp = std::min(ramp, n / 2);
  if (ramp == 0) return 1.0;
  if (i < ramp) return 0.5 - 0.5 * std::cos(std::numbers::pi * i / ramp);
  if (i >= n - ramp) return 0.5 - 0.5 * std::cos(std::numbers::pi * (n - i) / ramp);
  return 1.0;
}

// Syllable-structured voiced speech with drifting formants, pitch contour,
// pauses and fricative bursts.
inline std::vector<double> speechlike(size_t n, int rate, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> out(n, 0.0);
  const double f0_base = 90.0 + 150.0 * u(rng);
  const double tilt = 0.6 + 0.6 * u(rng);
  // Harmonic oscillators advance by complex rotation.
  std::complex<double> osc[48];
  double rolloff[48];
  for (int h = 1; h <= 48; ++h) {
    osc[h - 1] = 1.0;
    rolloff[h - 1] = std::pow(static_cast<double>(h), tilt * 0.5);
  }
  size_t pos = 0;
  double hp_prev_in = 0.0, hp_prev_out = 0.0;
  while (pos < n) {
    const size_t seg = static_cast<size_t>((0.10 + 0.22 * u(rng)) * rate);
    const double r = u(rng);
    int type = r < 0.18 ? 0 : (r < 0.32 ? 1 : 2);  // pause, fricative, voiced
    if (pos == 0 && type == 0) type = 2;  // never open with silence
    const double f1 = 300 + 600 * u(rng), f2 = 900 + 1500 * u(rng), f3 = 2300 + 1000 * u(rng);
    const double f1e = 300 + 600 * u(rng), f2e = 900 + 1500 * u(rng);
    const double level = 0.4 + 0.6 * u(rng);
    const double f0_slope = (u(rng) - 0.5) * 0.3;
    const size_t len = std::min(seg, n - pos);
    for (size_t i = 0; i < len; ++i) {
      const double prog = static_cast<double>(i) / std::max<size_t>(1, len);
      const double env = level * segment_gain(i, len, static_cast<size_t>(0.03 * rate));
      double v = 0.0;
      if (type == 2) {
        const double t = static_cast<double>(pos + i) / rate;
        const double f0 = f0_base * (1.0 + f0_slope * prog + 0.04 * std::sin(kTwoPi * 0.8 * t));
        const double ff1 = f1 + (f1e - f1) * prog, ff2 = f2 + (f2e - f2) * prog;
        const std::complex<double> step = std::polar(1.0, kTwoPi * f0 / rate);
        std::complex<double> rot = 1.0;
        for (int h = 1; h <= 48; ++h) {
          const double fh = f0 * h;
          if (fh > 0.45 * rate) break;
          rot *= step;
          std::complex<double>& z = osc[h - 1];
          z *= rot;
          z *= 1.5 - 0.5 * std::norm(z);
          auto res = [fh](double fc, double bw) {
            const double d = (fh - fc) / bw;
            return 1.0 / (1.0 + d * d);
          };
          const double gain = (res(ff1, 90) + 0.7 * res(ff2, 120) + 0.4 * res(f3, 160)) /
                              rolloff[h - 1];
          v += gain * z.imag();
        }
        v *= 0.25;
      } else if (type == 1) {
        // First-order high-passed white noise.
        const double in = gauss(rng);
        const double hp = 0.85 * (hp_prev_out + in - hp_prev_in);
        hp_prev_in = in;
        hp_prev_out = hp;
        v = 0.3 * hp;
      }
      out[pos + i] = env * v;
    }
    pos += len;
  }
  return out;
}

inline std::vector<double> tonal(size_t n, int rate, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int count = 1 + static_cast<int>(u(rng) * 3);
  std::vector<double> freq(count), amp(count), ph(count);
  for (int k = 0; k < count; ++k) {
    freq[k] = 200.0 + 2800.0 * u(rng);
    amp[k] = 0.3 + 0.7 * u(rng);
    ph[k] = kTwoPi * u(rng);
  }
  std::vector<double> out(n);
  for (size_t i = 0; i < n; ++i) {
    double v = 0.0;
    for (int k = 0; k < count; ++k) v += amp[k] * std::sin(kTwoPi * freq[k] * i / rate + ph[k]);
    out[i] = v;
  }
  return out;
}

inline std::vector<double> broadband(size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  // Mild one-pole colouring keeps the spectrum broad.
  const double a = 0.3 * u(rng);
  std::vector<double> out(n);
  double prev = 0.0;
  for (size_t i = 0; i < n; ++i) {
    prev = (1.0 - a) * gauss(rng) + a * prev;
    out[i] = prev;
  }
  return out;
}

inline std::vector<double> music_like(size_t n, int rate, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  static constexpr int kScale[] = {0, 2, 4, 5, 7, 9, 11, 12};
  const double root = 110.0 * std::pow(2.0, u(rng));
  std::vector<double> out(n, 0.0);
  size_t pos = 0;
  while (pos < n) {
    const size_t len = std::min(static_cast<size_t>((0.15 + 0.25 * u(rng)) * rate), n - pos);
    const int step = kScale[static_cast<int>(u(rng) * 8) % 8];
    const double f = root * std::pow(2.0, step / 12.0);
    const double decay = 3.0 + 5.0 * u(rng);
    for (size_t i = 0; i < len; ++i) {
      const double t = static_cast<double>(i) / rate;
      double v = 0.0;
      for (int h = 1; h <= 6; ++h) {
        if (f * h > 0.45 * rate) break;
        v += std::sin(kTwoPi * f * h * t) / h;
      }
      out[pos + i] = v * std::exp(-decay * t) * segment_gain(i, len, static_cast<size_t>(0.005 * rate));
    }
    pos += len;
  }
  return out;
}

}  // namespace detail

/// Deterministic synthetic source; peak-normalized to 0.9.
inline Waveform synth_source(SourceKind kind, double duration_s, uint64_t seed,
                             int sample_rate = kDefaultSampleRate) {
  if (!(duration_s > 0.0)) throw std::invalid_argument("synth_source: duration must be positive");
  const size_t n = static_cast<size_t>(std::llround(duration_s * sample_rate));
  if (n == 0) throw std::invalid_argument("synth_source: duration shorter than one sample");
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + static_cast<uint64_t>(kind) + 1);
  Waveform w;
  w.sample_rate = sample_rate;
  switch (kind) {
    case SourceKind::kSpeechlike: w.samples = detail::speechlike(n, sample_rate, rng); break;
    case SourceKind::kTonal: w.samples = detail::tonal(n, sample_rate, rng); break;
    case SourceKind::kBroadbandNoise: w.samples = detail::broadband(n, rng); break;
    case SourceKind::kMusicLike: w.samples = detail::music_like(n, sample_rate, rng); break;
    default: throw std::invalid_argument("synth_source: unknown source kind");
  }
  detail::normalize_peak(w.samples, 0.9);
  return w;
}

}  // namespace seanet

#endif  // SEANET_SIGNAL_SYNTH_HPP_
