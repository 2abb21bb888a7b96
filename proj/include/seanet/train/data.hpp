// Copyright 2026 The seanet-cpp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Training/evaluation examples: waveforms in the network scalar type plus
// the visual cue the network consumes.

#ifndef SEANET_TRAIN_DATA_HPP_
#define SEANET_TRAIN_DATA_HPP_

#include <algorithm>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "seanet/nn/encoders.hpp"
#include "seanet/nn/network.hpp"
#include "seanet/signal/manifest.hpp"
#include "seanet/signal/mixing.hpp"
#include "seanet/train/config.hpp"

namespace seanet {

template <typename T>
struct Example {
  std::string id;
  Scenario scenario = Scenario::kS;
  int sample_rate = kDefaultSampleRate;
  Matrix<T> mixture, target, noise;   // (T x 1)
  std::optional<VisualStream> stream;  // consumed by the visual encoder
  Matrix<T> visual;                    // (L x D_v) oracle features when `stream` is empty

  Index samples() const { return mixture.rows(); }
};

namespace detail {
template <typename T>
Matrix<T> column(const Waveform& w, size_t start, size_t len) {
  Matrix<T> m(static_cast<Index>(len), 1);
  for (size_t i = 0; i < len; ++i) m(static_cast<Index>(i), 0) = static_cast<T>(w.samples[start + i]);
  return m;
}

inline Waveform slice(const Waveform& w, size_t start, size_t len) {
  Waveform o;
  o.sample_rate = w.sample_rate;
  o.samples.assign(w.samples.begin() + static_cast<std::ptrdiff_t>(start),
                   w.samples.begin() + static_cast<std::ptrdiff_t>(start + len));
  return o;
}
}  // namespace detail

/// Builds an example for `cfg`. Without a usable recorded visual stream the
/// cue is rendered lip frames (visual front-end on) or the oracle embedding
/// (off). Lip images given to a network without a front-end fall back to the
/// oracle embedding.
template <typename T>
Example<T> make_example(const MixtureSample& m, const NetworkConfig& cfg) {
  Example<T> ex;
  ex.id = m.id;
  ex.scenario = m.scenario;
  ex.sample_rate = m.mixture.sample_rate;
  const size_t n = m.mixture.size();
  ex.mixture = detail::column<T>(m.mixture, 0, n);
  ex.target = detail::column<T>(m.target, 0, n);
  ex.noise = detail::column<T>(m.noise, 0, n);
  if (m.visual && (cfg.visual_frontend || m.visual->height == 1)) {
    ex.stream = m.visual;
  } else if (cfg.visual_frontend) {
    ex.stream = render_lip_frames(m.target);
  } else {
    const Index l = encoder_frames(static_cast<Index>(n), cfg.enc_win, cfg.enc_hop);
    ex.visual = oracle_visual_embed(m.target, l, cfg.visual_dim, cfg.enc_win, cfg.enc_hop).template cast<T>();
  }
  return ex;
}

/// Window of `len` samples starting at `start`, with the visual cue cut to
/// match (oracle features are recomputed on the cropped target so that
/// their frame grid stays aligned).
template <typename T>
Example<T> crop_example(const MixtureSample& m, const NetworkConfig& cfg, size_t start, size_t len) {
  MixtureSample c;
  c.id = m.id;
  c.scenario = m.scenario;
  c.mixture = detail::slice(m.mixture, start, len);
  c.target = detail::slice(m.target, start, len);
  c.noise = detail::slice(m.noise, start, len);
  if (m.visual) {
    VisualStream v = *m.visual;
    const double fps = v.frame_rate, rate = m.mixture.sample_rate;
    const size_t a = static_cast<size_t>(std::floor(start / rate * fps));
    const size_t b = std::min(v.size(), std::max(a + 1, static_cast<size_t>(std::llround((start + len) / rate * fps))));
    v.frames.assign(m.visual->frames.begin() + static_cast<std::ptrdiff_t>(std::min(a, v.size())),
                    m.visual->frames.begin() + static_cast<std::ptrdiff_t>(b));
    c.visual = std::move(v);
  }
  return make_example<T>(c, cfg);
}

/// Raw mixtures described by a data spec. Manifest items that fail to load
/// are reported through `errors` (id, message) and skipped.
inline std::vector<MixtureSample> load_mixtures(const DataSpec& spec,
                                                std::vector<std::pair<std::string, std::string>>* errors = nullptr,
                                                int sample_rate = kDefaultSampleRate) {
  std::vector<MixtureSample> out;
  if (spec.manifest) {
    for (const auto& r : read_manifest(*spec.manifest)) {
      try {
        out.push_back(load_record(r, sample_rate));
      } catch (const std::exception& e) {
        if (!errors) throw;
        errors->emplace_back(r.id, e.what());
      }
    }
    return out;
  }
  const auto& s = spec.synthetic;
  for (int i = 0; i < s.count; ++i) {
    const Scenario sc = s.scenarios[static_cast<size_t>(i) % s.scenarios.size()];
    out.push_back(generate_scenario(sc, s.duration, s.seed + static_cast<uint64_t>(i), sample_rate));
  }
  return out;
}

template <typename T>
std::vector<Example<T>> make_examples(const std::vector<MixtureSample>& ms, const NetworkConfig& cfg) {
  std::vector<Example<T>> out;
  out.reserve(ms.size());
  for (const auto& m : ms) out.push_back(make_example<T>(m, cfg));
  return out;
}

/// Visual input of an example for `net`.
template <typename T>
Var<T> visual_input(const ExtractionNetwork<T>& net, const Example<T>& ex) {
  if (ex.stream) return net.embed_visual(*ex.stream, ex.samples(), ex.sample_rate);
  return Var<T>(ex.visual);
}

}  // namespace seanet

#endif  // SEANET_TRAIN_DATA_HPP_
