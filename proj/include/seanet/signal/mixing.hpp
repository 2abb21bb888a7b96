// Copyright 2026 The seanet-cpp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Supervised mixture construction: x = s + sum_i o_i + b, where every noise
// component is scaled against the target at its own SNR.

#ifndef SEANET_SIGNAL_MIXING_HPP_
#define SEANET_SIGNAL_MIXING_HPP_

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "seanet/signal/audio.hpp"
#include "seanet/signal/synth.hpp"

namespace seanet {

/// Source composition of a mixture. kN (background only) exists for
/// mixtures built without an interfering speaker.
enum class Scenario { kS, kSN, kSS, kSSN, kN };

inline std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::kS: return "S";
    case Scenario::kSN: return "S_N";
    case Scenario::kSS: return "S_S";
    case Scenario::kSSN: return "S_S_N";
    case Scenario::kN: return "N";
  }
  return "?";
}

inline Scenario parse_scenario(const std::string& s) {
  if (s == "S") return Scenario::kS;
  if (s == "S_N") return Scenario::kSN;
  if (s == "S_S") return Scenario::kSS;
  if (s == "S_S_N") return Scenario::kSSN;
  if (s == "N") return Scenario::kN;
  throw std::invalid_argument("unknown scenario: " + s);
}

inline int interferer_count(Scenario s) {
  switch (s) {
    case Scenario::kS:
    case Scenario::kSN: return 1;
    case Scenario::kSS:
    case Scenario::kSSN: return 2;
    case Scenario::kN: return 0;
  }
  return 0;
}

inline bool has_background(Scenario s) {
  return s == Scenario::kSN || s == Scenario::kSSN || s == Scenario::kN;
}

struct MixtureSample {
  std::string id;
  Waveform mixture;
  Waveform target;
  Waveform noise;
  // Scaled noise components (interferers first, then background) and the
  // SNR each was scaled to. noise == sum(components).
  std::vector<Waveform> components;
  std::vector<double> component_snrs_db;
  std::vector<SourceKind> component_kinds;
  double snr_db = 0.0;
  Scenario scenario = Scenario::kS;
  // Common divisor applied to every signal when the mixture clipped.
  double peak_factor = 1.0;
  std::optional<VisualStream> visual;
};

inline constexpr double kSilenceEnergy = 1e-10;

inline double snr_db(const Waveform& reference, const Waveform& component) {
  return 10.0 * std::log10(reference.energy() / component.energy());
}

/// Returns `interference` scaled by g so that 10 log10(|s|^2 / |g o|^2) is
/// exactly `snr`.
inline Waveform scale_to_snr(const Waveform& target, const Waveform& interference, double snr) {
  check_compatible(target, interference, "scale_to_snr");
  const double es = target.energy(), eo = interference.energy();
  if (es <= 0.0) throw std::invalid_argument("scale_to_snr: target has zero energy, SNR undefined");
  if (eo <= 0.0)
    throw std::invalid_argument("scale_to_snr: interference has zero energy, SNR undefined");
  const double g = std::sqrt(es / (eo * std::pow(10.0, snr / 10.0)));
  Waveform out = interference;
  for (double& v : out.samples) v *= g;
  return out;
}

/// Builds x = s + n with n = sum of scaled interferers and background.
/// `snrs` holds one value per interferer followed by one for the
/// background. If the mixture peak exceeds 1, every signal is divided by
/// the same factor (additivity and SNRs are unchanged).
inline MixtureSample make_mixture(const Waveform& target, const std::vector<Waveform>& interferers,
                                  const std::optional<Waveform>& background,
                                  const std::vector<double>& snrs) {
  target.validate("target");
  const size_t n_sources = interferers.size() + (background ? 1 : 0);
  if (n_sources == 0)
    throw std::invalid_argument("make_mixture: no noise source (degenerate extraction task)");
  if (snrs.size() != n_sources)
    throw std::invalid_argument("make_mixture: expected " + std::to_string(n_sources) +
                                " SNR values, got " + std::to_string(snrs.size()));
  MixtureSample m;
  m.target = target;
  m.noise.sample_rate = target.sample_rate;
  m.noise.samples.assign(target.size(), 0.0);
  auto add_component = [&](const Waveform& src, double snr, SourceKind kind) {
    Waveform scaled = scale_to_snr(target, src, snr);
    for (size_t i = 0; i < scaled.size(); ++i) m.noise.samples[i] += scaled.samples[i];
    m.components.push_back(std::move(scaled));
    m.component_snrs_db.push_back(snr);
    m.component_kinds.push_back(kind);
  };
  for (size_t i = 0; i < interferers.size(); ++i)
    add_component(interferers[i], snrs[i], SourceKind::kSpeechlike);
  if (background) add_component(*background, snrs.back(), SourceKind::kBroadbandNoise);

  m.mixture = m.target;
  for (size_t i = 0; i < m.mixture.size(); ++i) m.mixture.samples[i] += m.noise.samples[i];
  const double peak = m.mixture.peak();
  if (peak > 1.0) {
    m.peak_factor = peak;
    auto shrink = [peak](Waveform& w) {
      for (double& v : w.samples) v /= peak;
    };
    shrink(m.target);
    for (auto& c : m.components) shrink(c);
    // Rebuild noise and mixture from the scaled parts so x - s - n stays exact.
    std::fill(m.noise.samples.begin(), m.noise.samples.end(), 0.0);
    for (const auto& c : m.components)
      for (size_t i = 0; i < c.size(); ++i) m.noise.samples[i] += c.samples[i];
    for (size_t i = 0; i < m.mixture.size(); ++i)
      m.mixture.samples[i] = m.target.samples[i] + m.noise.samples[i];
  }
  const int n_int = static_cast<int>(interferers.size());
  if (n_int == 0) {
    m.scenario = Scenario::kN;
  } else if (n_int == 1) {
    m.scenario = background ? Scenario::kSN : Scenario::kS;
  } else {
    m.scenario = background ? Scenario::kSSN : Scenario::kSS;
  }
  m.snr_db = snrs.front();
  return m;
}

namespace detail {
// Draws sources until one clears the silence guard.
inline Waveform draw_source(SourceKind kind, double duration, std::mt19937_64& rng, int rate) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    Waveform w = synth_source(kind, duration, rng(), rate);
    if (w.energy() >= kSilenceEnergy) return w;
  }
  throw std::runtime_error("draw_source: could not draw a non-silent source");
}
}  // namespace detail

/// Deterministic synthetic mixture of the requested composition. Speech
/// interferers are drawn at SNR ~ U[-10, 10] dB, non-speech background at
/// U[-5, 5] dB.
inline MixtureSample generate_scenario(Scenario kind, double duration_s, uint64_t seed,
                                       int sample_rate = kDefaultSampleRate) {
  if (!(duration_s > 0.0)) throw std::invalid_argument("generate_scenario: duration must be positive");
  std::mt19937_64 rng(seed ^ 0x5EA0E7ULL);
  std::uniform_real_distribution<double> speech_snr(-10.0, 10.0), noise_snr(-5.0, 5.0), u(0.0, 1.0);
  Waveform target = detail::draw_source(SourceKind::kSpeechlike, duration_s, rng, sample_rate);
  std::vector<Waveform> interferers;
  std::vector<double> snrs;
  for (int i = 0; i < interferer_count(kind); ++i) {
    interferers.push_back(detail::draw_source(SourceKind::kSpeechlike, duration_s, rng, sample_rate));
    snrs.push_back(speech_snr(rng));
  }
  std::optional<Waveform> background;
  SourceKind bg_kind = SourceKind::kBroadbandNoise;
  if (has_background(kind)) {
    static constexpr SourceKind kBackgrounds[] = {SourceKind::kTonal, SourceKind::kBroadbandNoise,
                                                  SourceKind::kMusicLike};
    bg_kind = kBackgrounds[static_cast<int>(u(rng) * 3) % 3];
    background = detail::draw_source(bg_kind, duration_s, rng, sample_rate);
    snrs.push_back(noise_snr(rng));
  }
  MixtureSample m = make_mixture(target, interferers, background, snrs);
  if (background) m.component_kinds.back() = bg_kind;
  m.id = to_string(kind) + "_" + std::to_string(seed);
  return m;
}

}  // namespace seanet

#endif  // SEANET_SIGNAL_MIXING_HPP_
