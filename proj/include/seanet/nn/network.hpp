// Copyright 2026 The seanet-cpp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Full extraction network: encoders, fusion, pre-extractor/pre-suppressor,
// R PSNL blocks, mask heads and the shared decoder.

#ifndef SEANET_NN_NETWORK_HPP_
#define SEANET_NN_NETWORK_HPP_

#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "seanet/nn/config.hpp"
#include "seanet/nn/decoder.hpp"
#include "seanet/nn/dprnn.hpp"
#include "seanet/nn/encoders.hpp"
#include "seanet/nn/fusion.hpp"
#include "seanet/nn/multimodal.hpp"
#include "seanet/nn/psnl.hpp"

namespace seanet {

struct ParamReport {
  size_t total = 0;
  size_t frozen = 0;
  std::vector<std::pair<std::string, size_t>> modules;  // top-level prefix -> trainable count
  std::string notes;

  std::string to_text() const {
    std::ostringstream os;
    for (const auto& [name, n] : modules) os << "  " << name << ": " << n << "\n";
    os << "  total trainable: " << total << "\n";
    if (frozen) os << "  frozen (not counted): " << frozen << "\n";
    if (!notes.empty()) os << notes;
    return os.str();
  }
};

template <typename T>
class ExtractionNetwork {
 public:
  explicit ExtractionNetwork(const NetworkConfig& cfg) : cfg_(cfg), store_(cfg.seed) {
    cfg.validate();
    const Index d = cfg.feature_dim;
    const bool noise = seanet::has_noise_branch(cfg.variant);
    encoder_ = AudioEncoder<T>(store_, "audio_encoder", cfg.audio_dim, cfg.enc_win, cfg.enc_hop);
    if (cfg.visual_frontend) visual_ = VisualEncoder<T>(store_, "visual_encoder", cfg);
    fusion_ = Fusion<T>(store_, "fusion", cfg);
    if (cfg.mm_variant == MultimodalVariant::kFusion) {
      MmAttentionConfig mm;
      mm.share_av_projections = cfg.share_av_projections;
      mm_fusion_ = MmTemporalAttention<T>(store_, "mm_fusion", d, cfg.visual_dim, mm, cfg.fusion_combine);
    }
    pre_extractor_ = DualPathUnit<T>(store_, "pre_extractor", d, cfg.hidden, cfg.gn_groups);
    if (noise) pre_suppressor_ = DualPathUnit<T>(store_, "pre_suppressor", d, cfg.hidden, cfg.gn_groups);
    for (int i = 0; i < cfg.num_blocks; ++i)
      blocks_.emplace_back(store_, "psnl." + std::to_string(i), cfg);
    speech_head_ = MaskHead<T>(store_, "speech_head", d, cfg.audio_dim);
    if (noise) noise_head_ = MaskHead<T>(store_, "noise_head", d, cfg.audio_dim);
    decoder_ = WaveDecoder<T>(store_, "decoder", cfg.audio_dim, cfg.enc_win, cfg.enc_hop);
    if (cfg.mm_variant == MultimodalVariant::kContrastive)
      visual_proj_ = Linear<T>(store_, "contrastive_proj", cfg.visual_dim, d);
  }

  ExtractionNetwork(const ExtractionNetwork&) = delete;
  ExtractionNetwork& operator=(const ExtractionNetwork&) = delete;

  const NetworkConfig& config() const { return cfg_; }
  ParameterStore<T>& parameters() { return store_; }
  const ParameterStore<T>& parameters() const { return store_; }
  bool has_noise_branch() const { return seanet::has_noise_branch(cfg_.variant); }
  const std::vector<PsnlBlock<T>>& blocks() const { return blocks_; }

  Index frames_for(Index num_samples) const { return encoder_frames(num_samples, cfg_.enc_win, cfg_.enc_hop); }

  /// Visual embedding (L x D_v) from a stream: lip frames through the visual
  /// encoder, or feature frames (height 1) up-sampled directly when the
  /// front-end is disabled.
  Var<T> embed_visual(const VisualStream& v, Index num_samples, int sample_rate) const {
    const Index l = frames_for(num_samples);
    if (cfg_.visual_frontend) return visual_(v, l, num_samples, sample_rate);
    if (v.height != 1) throw std::invalid_argument("network without a visual front-end needs feature frames");
    VisualEncoder<T> passthrough;
    passthrough.dim = cfg_.visual_dim;
    passthrough.mode = cfg_.upsample;
    return passthrough(v, l, num_samples, sample_rate);
  }

  /// x: (T x 1) mixture; visual: (L x D_v) embedding aligned with the audio
  /// encoder frames.
  BlockOutputs<T> forward(const Var<T>& x, const Var<T>& visual) const {
    if (x.cols() != 1) throw std::invalid_argument("forward: mixture must be (T x 1)");
    const Index num_samples = x.rows();
    Var<T> enc = encoder_(x);
    if (visual.rows() != enc.rows() || visual.cols() != cfg_.visual_dim)
      throw std::invalid_argument("forward: visual embedding is " + std::to_string(visual.rows()) + "x" +
                                  std::to_string(visual.cols()) + ", expected " + std::to_string(enc.rows()) + "x" +
                                  std::to_string(cfg_.visual_dim));
    Var<T> fused;
    if (cfg_.mm_variant == MultimodalVariant::kFusion)
      fused = fusion_.combine(mm_fusion_.fuse(fusion_.audio_features(enc), visual), visual);
    else
      fused = fusion_(enc, visual);

    ChunkedEmbedding<T> y = segment(fused, cfg_.chunk_len);
    const ChunkGeometry& g = y.geom;
    const bool noise = has_noise_branch();

    BlockOutputs<T> out;
    out.geom = g;
    Var<T> vis_chunks;
    if (cfg_.mm_variant == MultimodalVariant::kPsnl) vis_chunks = segment(visual, cfg_.chunk_len).data;
    if (cfg_.mm_variant == MultimodalVariant::kContrastive)
      out.visual_chunks = segment(visual_proj_(visual), cfg_.chunk_len).data;

    Var<T> ms = pre_extractor_(y.data, g);
    Var<T> mn = noise ? pre_suppressor_(y.data, g) : Var<T>();
    auto emit = [&](const Var<T>& s, const Var<T>& n) {
      out.speech_chunks.push_back(s);
      Var<T> sa = aggregate(s, g);
      out.speech_masks.push_back(sa);
      out.decoded_speech.push_back(mask_and_decode(speech_head_, decoder_, sa, enc, num_samples));
      if (!noise) return;
      out.noise_chunks.push_back(n);
      Var<T> na = aggregate(n, g);
      out.noise_masks.push_back(na);
      out.decoded_noise.push_back(mask_and_decode(noise_head_, decoder_, na, enc, num_samples));
    };
    emit(ms, mn);
    for (const auto& b : blocks_) {
      auto [s, n] = b(ms, mn, g, vis_chunks);
      ms = s;
      mn = n;
      emit(ms, mn);
    }
    return out;
  }

  /// Training objective: the multi-output loss plus the weighted contrastive
  /// term for the contrastive variant.
  LossTerms<T> loss(const BlockOutputs<T>& o, const Matrix<T>& s, const Matrix<T>& n) const {
    LossTerms<T> t = total_loss(o, s, n, cfg_.beta);
    if (cfg_.mm_variant == MultimodalVariant::kContrastive) {
      t.contrastive = contrastive_av_loss(o.speech_chunks, o.noise_chunks, o.visual_chunks);
      t.total = add(t.total, scale(t.contrastive, static_cast<T>(cfg_.contrastive_weight)));
    }
    return t;
  }

  /// Estimated target for a mixture, without building a graph.
  Matrix<T> extract(const Matrix<T>& x, const Matrix<T>& visual) const {
    NoGradGuard guard;
    return forward(Var<T>(x), Var<T>(visual)).estimate().value();
  }

  ParamReport param_report() const {
    ParamReport r;
    std::map<std::string, size_t> by_prefix;
    std::vector<std::string> order;
    for (const auto& e : store_.entries()) {
      const size_t n = static_cast<size_t>(e.var.value().size());
      if (!e.trainable) {
        r.frozen += n;
        continue;
      }
      std::string key = e.name.substr(0, e.name.find('.'));
      if (key == "psnl") {
        const size_t a = e.name.find('.'), b = e.name.find('.', a + 1);
        key = e.name.substr(0, b);
      }
      if (!by_prefix.count(key)) order.push_back(key);
      by_prefix[key] += n;
      r.total += n;
    }
    for (const auto& k : order) r.modules.emplace_back(k, by_prefix[k]);
    std::ostringstream notes;
    notes << "  recurrent hidden size " << cfg_.hidden << " per direction, single-head attention, "
          << "frozen lip front-end excluded from the trainable total\n";
    r.notes = notes.str();
    return r;
  }

  /// Copies every parameter of `base` whose name and shape match; returns
  /// the number of arrays copied. Used to extend a trained base network
  /// with the multi-modal modules.
  size_t load_matching(const ParameterStore<T>& base) {
    size_t copied = 0;
    for (const auto& e : base.entries()) {
      if (!store_.contains(e.name)) continue;
      Var<T> dst = store_.at(e.name);
      if (dst.rows() != e.var.rows() || dst.cols() != e.var.cols())
        throw std::invalid_argument("load_matching: shape mismatch for " + e.name);
      dst.mutable_value() = e.var.value();
      ++copied;
    }
    return copied;
  }

 private:
  NetworkConfig cfg_;
  ParameterStore<T> store_;
  AudioEncoder<T> encoder_;
  VisualEncoder<T> visual_;
  Fusion<T> fusion_;
  MmTemporalAttention<T> mm_fusion_;
  DualPathUnit<T> pre_extractor_, pre_suppressor_;
  std::vector<PsnlBlock<T>> blocks_;
  MaskHead<T> speech_head_, noise_head_;
  WaveDecoder<T> decoder_;
  Linear<T> visual_proj_;
};

}  // namespace seanet

#endif  // SEANET_NN_NETWORK_HPP_
