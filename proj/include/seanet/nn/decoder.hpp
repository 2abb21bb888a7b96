// Copyright 2026 The seanet-cpp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Mask heads, the shared waveform decoder and the multi-output objective.
//
// Loss over R+1 block outputs (l = negative SI-SDR):
//   L_main = l(s_R, s)
//   L_aux  = sum_{i=0}^{R-1} l(s_i, s) + sum_{i=0}^{R} l(n_i, n)
//   L      = L_main + beta * L_aux

#ifndef SEANET_NN_DECODER_HPP_
#define SEANET_NN_DECODER_HPP_

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "seanet/metrics/metrics.hpp"
#include "seanet/nn/config.hpp"
#include "seanet/nn/fusion.hpp"
#include "seanet/nn/layers.hpp"

namespace seanet {

/// pReLU followed by a pointwise projection D -> D_a, applied to an
/// aggregated (L x D) embedding. No output nonlinearity: masks may be signed.
template <typename T>
struct MaskHead {
  Var<T> alpha;
  Linear<T> proj;

  MaskHead() = default;
  MaskHead(ParameterStore<T>& store, const std::string& name, Index dim, Index audio_dim) {
    alpha = store.create(name + ".prelu", 1, 1, Init::kConstant, 0.25);
    proj = Linear<T>(store, name + ".proj", dim, audio_dim);
  }

  Var<T> operator()(const Var<T>& m) const { return proj(prelu(m, alpha)); }
};

/// Bias-free linear D_a -> window followed by normalized overlap-add at the
/// encoder hop.
template <typename T>
struct WaveDecoder {
  Linear<T> basis;
  Index hop = 16;

  WaveDecoder() = default;
  WaveDecoder(ParameterStore<T>& store, const std::string& name, Index audio_dim, Index win, Index hop_size)
      : basis(store, name + ".basis", audio_dim, win, false), hop(hop_size) {}

  Index window() const { return basis.out_features(); }

  /// (L x D_a) masked embedding -> (num_samples x 1) waveform.
  Var<T> operator()(const Var<T>& masked, Index num_samples) const {
    if (masked.cols() != basis.in_features())
      throw std::invalid_argument("decoder: expected " + std::to_string(basis.in_features()) + " channels, got " +
                                  std::to_string(masked.cols()));
    if (masked.rows() < 1 || num_samples < 1) throw std::invalid_argument("decoder: empty input");
    return overlap_add(basis(masked), hop, num_samples, true);
  }
};

/// head(M) (.) X decoded to a waveform of the input length.
template <typename T>
Var<T> mask_and_decode(const MaskHead<T>& head, const WaveDecoder<T>& dec, const Var<T>& m, const Var<T>& x,
                       Index num_samples) {
  if (m.rows() != x.rows())
    throw std::invalid_argument("mask_and_decode: mask has " + std::to_string(m.rows()) + " frames, encoder output has " +
                                std::to_string(x.rows()));
  return dec(mul(head(m), x), num_samples);
}

/// Negative SI-SDR of a (T x 1) estimate against a fixed reference, with the
/// same epsilon convention as the metric module.
template <typename T>
Var<T> si_sdr_loss(const Var<T>& est, const Matrix<T>& ref) {
  if (est.cols() != 1 || ref.cols() != 1 || est.rows() != ref.rows())
    throw std::invalid_argument("si_sdr_loss: estimate is " + std::to_string(est.rows()) + " samples, reference " +
                                std::to_string(ref.rows()));
  const auto& e = est.value();
  const size_t n = static_cast<size_t>(e.rows());
  const detail::SiSdrTerms t = detail::si_sdr_terms(e.data(), ref.data(), n);
  Matrix<T> y(1, 1);
  y(0, 0) = static_cast<T>(-t.value);
  return make_op<T>(std::move(y), {est}, [ref, t](Node<T>& out) {
    const auto& ev = out.parents[0]->value;
    double rr = 0.0;
    for (Index i = 0; i < ref.rows(); ++i) rr += double(ref(i, 0)) * double(ref(i, 0));
    const double c = rr + kMetricEps;
    const double num = detail::numerator_floor(t.target_energy);
    const double den = t.residual_energy + kMetricEps;
    const double k = -10.0 / std::log(10.0) * double(out.grad(0, 0));
    Matrix<T> g(ev.rows(), 1);
    for (Index i = 0; i < ev.rows(); ++i) {
      const double r = ref(i, 0);
      const double d_num = 2.0 * t.alpha * rr * r / c;
      const double d_den = 2.0 * (double(ev(i, 0)) - t.alpha * r) - 2.0 * t.alpha * kMetricEps * r / c;
      g(i, 0) = static_cast<T>(k * (d_num / num - d_den / den));
    }
    push_grad(out, 0, g);
  });
}

/// Per-block embeddings and decoded waveforms. Noise lists are empty for
/// single-path variants.
template <typename T>
struct BlockOutputs {
  std::vector<Var<T>> speech_masks;    // aggregated M_si, (L x D)
  std::vector<Var<T>> noise_masks;     // aggregated M_ni
  std::vector<Var<T>> speech_chunks;   // chunked M_si, (P*K x D)
  std::vector<Var<T>> noise_chunks;
  std::vector<Var<T>> decoded_speech;  // (T x 1)
  std::vector<Var<T>> decoded_noise;
  Var<T> visual_chunks;                // chunk-aligned visual projection (contrastive variant)
  ChunkGeometry geom;

  Index num_blocks() const { return static_cast<Index>(decoded_speech.size()) - 1; }
  const Var<T>& estimate() const {
    if (decoded_speech.empty()) throw std::logic_error("BlockOutputs: no decoded speech");
    return decoded_speech.back();
  }
};

template <typename T>
struct LossTerms {
  Var<T> total;
  Var<T> main;
  std::vector<Var<T>> speech_aux;  // i = 0..R-1
  std::vector<Var<T>> noise_aux;   // i = 0..R
  Var<T> contrastive;              // undefined unless the contrastive variant is active
};

/// Assembles L_main + beta * L_aux. `decoded_noise` must be empty or hold
/// exactly as many entries as `decoded_speech`.
template <typename T>
LossTerms<T> total_loss(const std::vector<Var<T>>& decoded_speech, const std::vector<Var<T>>& decoded_noise,
                        const Matrix<T>& s, const Matrix<T>& n, double beta) {
  if (beta < 0.0) throw std::invalid_argument("total_loss: beta must be >= 0");
  if (decoded_speech.empty()) throw std::invalid_argument("total_loss: no speech outputs");
  if (!decoded_noise.empty() && decoded_noise.size() != decoded_speech.size())
    throw std::invalid_argument("total_loss: expected " + std::to_string(decoded_speech.size()) +
                                " noise outputs, got " + std::to_string(decoded_noise.size()));
  for (const auto& v : decoded_speech)
    if (!v.defined()) throw std::invalid_argument("total_loss: missing speech output");
  for (const auto& v : decoded_noise)
    if (!v.defined()) throw std::invalid_argument("total_loss: missing noise output");
  const size_t r = decoded_speech.size() - 1;
  LossTerms<T> out;
  out.main = si_sdr_loss(decoded_speech[r], s);
  for (size_t i = 0; i < r; ++i) out.speech_aux.push_back(si_sdr_loss(decoded_speech[i], s));
  for (const auto& v : decoded_noise) out.noise_aux.push_back(si_sdr_loss(v, n));
  std::vector<Var<T>> aux = out.speech_aux;
  aux.insert(aux.end(), out.noise_aux.begin(), out.noise_aux.end());
  if (beta == 0.0 || aux.empty())
    out.total = out.main;
  else
    out.total = add(out.main, scale(sum(aux), static_cast<T>(beta)));
  return out;
}

template <typename T>
LossTerms<T> total_loss(const BlockOutputs<T>& o, const Matrix<T>& s, const Matrix<T>& n, double beta) {
  return total_loss(o.decoded_speech, o.decoded_noise, s, n, beta);
}

}  // namespace seanet

#endif  // SEANET_NN_DECODER_HPP_
