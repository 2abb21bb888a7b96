// Copyright 2026 The seanet-cpp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Audio-visual interaction variants: multi-modal temporal attention (used
// at fusion or inside PSNL blocks) and the contrastive speech/noise-visual
// objective.

#ifndef SEANET_NN_MULTIMODAL_HPP_
#define SEANET_NN_MULTIMODAL_HPP_

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "seanet/nn/config.hpp"
#include "seanet/nn/layers.hpp"

namespace seanet {

enum class MmPlacement { kFusion, kPsnl };

struct MmAttentionConfig {
  MmPlacement placement = MmPlacement::kFusion;
  bool share_av_projections = false;
  bool chunked_visual = false;

  void validate() const {
    if (placement == MmPlacement::kPsnl && !chunked_visual)
      throw std::invalid_argument("multi-modal attention inside PSNL blocks needs a chunked visual stream");
  }
};

/// Visual queries attend over audio keys/values in two branches:
///   F'_s = softmax( Q_vs K_s^T / sqrt(D)) V_s + F_s
///   F'_n = softmax(-Q_vn K_n^T / sqrt(D)) V_n + F_n
template <typename T>
class MmTemporalAttention {
 public:
  MmTemporalAttention() = default;
  MmTemporalAttention(ParameterStore<T>& store, const std::string& name, Index dim, Index visual_dim,
                      const MmAttentionConfig& cfg, FusionCombine combine = FusionCombine::kSum)
      : cfg_(cfg), combine_(combine), dim_(dim) {
    cfg.validate();
    q_speech = Linear<T>(store, name + ".q_speech", visual_dim, dim);
    q_noise = Linear<T>(store, name + ".q_noise", visual_dim, dim);
    k_speech = Linear<T>(store, name + ".k_speech", dim, dim);
    v_speech = Linear<T>(store, name + ".v_speech", dim, dim);
    if (cfg.share_av_projections) {
      k_noise = k_speech;
      v_noise = v_speech;
    } else {
      k_noise = Linear<T>(store, name + ".k_noise", dim, dim);
      v_noise = Linear<T>(store, name + ".v_noise", dim, dim);
    }
    if (cfg.placement == MmPlacement::kFusion && combine == FusionCombine::kConcat)
      merge = Linear<T>(store, name + ".merge", 2 * dim, dim);
  }

  /// Both attentive outputs, (F'_s, F'_n).
  std::pair<Var<T>, Var<T>> operator()(const Var<T>& fs, const Var<T>& fn, const Var<T>& vq,
                                       const SequenceLayout& layout) const {
    if (fs.rows() != vq.rows() || fn.rows() != vq.rows())
      throw std::invalid_argument("multi-modal attention: audio has " + std::to_string(fs.rows()) +
                                  " steps, visual query has " + std::to_string(vq.rows()));
    const T sc = T(1) / std::sqrt(static_cast<T>(dim_));
    Var<T> s = add(attention(q_speech(vq), k_speech(fs), v_speech(fs), layout, T(1), sc), fs);
    Var<T> n = add(attention(q_noise(vq), k_noise(fn), v_noise(fn), layout, T(-1), sc), fn);
    return {s, n};
  }

  /// Fusion placement: F_s == F_n == the audio features; the two branch
  /// outputs are summed (or concatenated and projected).
  Var<T> fuse(const Var<T>& audio, const Var<T>& v) const {
    auto [s, n] = (*this)(audio, audio, v, SequenceLayout::whole(audio.rows()));
    if (combine_ == FusionCombine::kConcat) return merge(concat_cols(s, n));
    return add(s, n);
  }

  Linear<T> q_speech, q_noise, k_speech, v_speech, k_noise, v_noise, merge;

 private:
  MmAttentionConfig cfg_;
  FusionCombine combine_ = FusionCombine::kSum;
  Index dim_ = 0;
};

/// -sum_i [mean_t cos(M_si[t], V[t]) - mean_t cos(M_ni[t], V[t])].
template <typename T>
Var<T> contrastive_av_loss(const std::vector<Var<T>>& speech, const std::vector<Var<T>>& noise, const Var<T>& v) {
  if (speech.size() != noise.size() || speech.empty())
    throw std::invalid_argument("contrastive loss: speech/noise lists must be non-empty and equal length");
  std::vector<Var<T>> terms;
  for (size_t i = 0; i < speech.size(); ++i) {
    terms.push_back(mean_row_cosine(noise[i], v));
    terms.push_back(scale(mean_row_cosine(speech[i], v), T(-1)));
  }
  return sum(terms);
}

}  // namespace seanet

#endif  // SEANET_NN_MULTIMODAL_HPP_
