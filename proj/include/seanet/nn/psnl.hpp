// Copyright 2026 The seanet-cpp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Parallel speech-and-noise learning block.
//
//   intra-att (K axis) -> M + GN(Linear(.))
//   inter-att (P axis) -> M + GN(Linear(.))
//   [visual interaction along the K axis, P-SEANet only]
//   extractor on the speech path, suppressor on the noise path
//
// Single-path variants (AV-DPRNN, S1) carry no noise embedding; their noise
// output is an undefined Var.

#ifndef SEANET_NN_PSNL_HPP_
#define SEANET_NN_PSNL_HPP_

#include <stdexcept>
#include <string>
#include <utility>

#include "seanet/nn/config.hpp"
#include "seanet/nn/dprnn.hpp"
#include "seanet/nn/multimodal.hpp"
#include "seanet/nn/reverse_attention.hpp"

namespace seanet {

/// Linear + group-norm applied after an attention module, with a residual.
template <typename T>
struct PostAttention {
  Linear<T> proj;
  GroupNorm<T> norm;

  PostAttention() = default;
  PostAttention(ParameterStore<T>& store, const std::string& name, Index dim, int groups)
      : proj(store, name + ".proj", dim, dim), norm(store, name + ".norm", dim, groups) {}

  Var<T> operator()(const Var<T>& residual, const Var<T>& attended) const {
    return add(residual, norm(proj(attended)));
  }
};

template <typename T>
class PsnlBlock {
 public:
  PsnlBlock() = default;
  PsnlBlock(ParameterStore<T>& store, const std::string& name, const NetworkConfig& cfg)
      : variant_(cfg.variant), noise_(seanet::has_noise_branch(cfg.variant)) {
    const Index d = cfg.feature_dim;
    const int g = cfg.gn_groups;
    if (has_attention(cfg.variant)) {
      const AttentionMode mode = attention_mode(cfg.variant);
      const bool noise_self = cfg.variant != Variant::kBeta;
      intra_att_ = ReverseAttention<T>(store, name + ".intra_att", d, mode, noise_, noise_self);
      inter_att_ = ReverseAttention<T>(store, name + ".inter_att", d, mode, noise_, noise_self);
      intra_post_s_ = PostAttention<T>(store, name + ".intra_post.speech", d, g);
      inter_post_s_ = PostAttention<T>(store, name + ".inter_post.speech", d, g);
      if (noise_) {
        intra_post_n_ = PostAttention<T>(store, name + ".intra_post.noise", d, g);
        inter_post_n_ = PostAttention<T>(store, name + ".inter_post.noise", d, g);
      }
    }
    if (cfg.mm_variant == MultimodalVariant::kPsnl) {
      MmAttentionConfig mm;
      mm.placement = MmPlacement::kPsnl;
      mm.chunked_visual = true;
      mm.share_av_projections = cfg.share_av_projections;
      mm_ = MmTemporalAttention<T>(store, name + ".mm_att", d, cfg.visual_dim, mm);
      has_mm_ = true;
    }
    if (has_block_extractors(cfg.variant)) {
      extractor_ = DualPathUnit<T>(store, name + ".extractor", d, cfg.hidden, g);
      if (noise_) suppressor_ = DualPathUnit<T>(store, name + ".suppressor", d, cfg.hidden, g);
      has_units_ = true;
    }
  }

  bool has_noise_branch() const { return noise_; }
  bool has_units() const { return has_units_; }
  const ReverseAttention<T>& intra_attention() const { return intra_att_; }
  const ReverseAttention<T>& inter_attention() const { return inter_att_; }

  /// `visual_chunks` is the chunked visual stream (P*K x D_v); only read by
  /// P-SEANet blocks.
  std::pair<Var<T>, Var<T>> operator()(const Var<T>& ms, const Var<T>& mn, const ChunkGeometry& geom,
                                       const Var<T>& visual_chunks = Var<T>()) const {
    if (ms.rows() != geom.rows()) throw std::invalid_argument("PSNL block: speech embedding does not match geometry");
    if (noise_ && (!mn.defined() || mn.rows() != ms.rows() || mn.cols() != ms.cols()))
      throw std::invalid_argument("PSNL block: speech/noise embeddings differ in shape");
    Var<T> s = ms;
    Var<T> n = noise_ ? mn : Var<T>();
    if (variant_ != Variant::kAvDprnn) {
      auto [as, an] = intra_att_(s, n, geom.intra());
      s = intra_post_s_(s, as);
      if (noise_) n = intra_post_n_(n, an);
      auto [bs, bn] = inter_att_(s, n, geom.inter());
      s = inter_post_s_(s, bs);
      if (noise_) n = inter_post_n_(n, bn);
    }
    if (has_mm_) {
      if (!visual_chunks.defined() || visual_chunks.rows() != geom.rows())
        throw std::invalid_argument("PSNL block: visual chunks do not match the audio chunk geometry");
      auto [vs, vn] = mm_(s, n, visual_chunks, geom.intra());
      s = vs;
      n = vn;
    }
    if (has_units_) {
      s = extractor_(s, geom);
      if (noise_) n = suppressor_(n, geom);
    }
    return {s, n};
  }

 private:
  Variant variant_ = Variant::kSeanet;
  bool noise_ = true;
  bool has_mm_ = false;
  bool has_units_ = false;
  ReverseAttention<T> intra_att_, inter_att_;
  PostAttention<T> intra_post_s_, intra_post_n_, inter_post_s_, inter_post_n_;
  MmTemporalAttention<T> mm_;
  DualPathUnit<T> extractor_, suppressor_;
};

}  // namespace seanet

#endif  // SEANET_NN_PSNL_HPP_
