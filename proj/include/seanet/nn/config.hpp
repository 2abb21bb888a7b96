// Copyright 2026 The seanet-cpp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SEANET_NN_CONFIG_HPP_
#define SEANET_NN_CONFIG_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace seanet {

/// Architecture family. kAlpha/kBeta/kGamma are the PSNL-block ablations;
/// kS1..kS4 the attention-structure ablations.
enum class Variant { kSeanet, kAvDprnn, kS1, kS2, kS3, kS4, kAlpha, kBeta, kGamma };

enum class MultimodalVariant { kNone, kFusion, kPsnl, kContrastive };

/// How a branch builds its attention scores.
enum class AttentionMode {
  kFull,           // 1/2 (softmax(Q K^T) + softmax(-Q' K^T))
  kSelfOnly,       // softmax(Q K^T)
  kCrossPositive,  // softmax(+Q' K^T)
  kCrossReverse,   // softmax(-Q' K^T)
  kBothPositive,   // 1/2 (softmax(Q K^T) + softmax(+Q' K^T))
  kGamma,          // softmax((Q - Q') K^T)
};

enum class UpsampleMode { kNearest, kLinear };
enum class FusionCombine { kSum, kConcat };

inline std::string to_string(Variant v) {
  switch (v) {
    case Variant::kSeanet: return "SEANET";
    case Variant::kAvDprnn: return "AV_DPRNN";
    case Variant::kS1: return "S1";
    case Variant::kS2: return "S2";
    case Variant::kS3: return "S3";
    case Variant::kS4: return "S4";
    case Variant::kAlpha: return "ALPHA";
    case Variant::kBeta: return "BETA";
    case Variant::kGamma: return "GAMMA";
  }
  return "?";
}

inline Variant parse_variant(const std::string& s) {
  for (Variant v : {Variant::kSeanet, Variant::kAvDprnn, Variant::kS1, Variant::kS2, Variant::kS3,
                    Variant::kS4, Variant::kAlpha, Variant::kBeta, Variant::kGamma})
    if (to_string(v) == s) return v;
  if (s == "BETA_VARIANT") return Variant::kBeta;
  throw std::invalid_argument("unknown variant: " + s);
}

inline std::string to_string(MultimodalVariant v) {
  switch (v) {
    case MultimodalVariant::kNone: return "NONE";
    case MultimodalVariant::kFusion: return "F";
    case MultimodalVariant::kPsnl: return "P";
    case MultimodalVariant::kContrastive: return "A";
  }
  return "?";
}

inline MultimodalVariant parse_mm_variant(const std::string& s) {
  if (s == "NONE") return MultimodalVariant::kNone;
  if (s == "F") return MultimodalVariant::kFusion;
  if (s == "P") return MultimodalVariant::kPsnl;
  if (s == "A") return MultimodalVariant::kContrastive;
  throw std::invalid_argument("unknown multimodal variant: " + s);
}

inline bool has_noise_branch(Variant v) { return v != Variant::kAvDprnn && v != Variant::kS1; }
inline bool has_attention(Variant v) { return v != Variant::kAvDprnn; }
inline bool has_block_extractors(Variant v) { return v != Variant::kAlpha; }

inline AttentionMode attention_mode(Variant v) {
  switch (v) {
    case Variant::kS1: return AttentionMode::kSelfOnly;
    case Variant::kS2: return AttentionMode::kCrossPositive;
    case Variant::kS3: return AttentionMode::kCrossReverse;
    case Variant::kS4: return AttentionMode::kBothPositive;
    case Variant::kGamma: return AttentionMode::kGamma;
    default: return AttentionMode::kFull;
  }
}

struct NetworkConfig {
  int chunk_len = 100;    // K
  int audio_dim = 256;    // D_a
  int visual_dim = 256;   // D_v
  int feature_dim = 64;   // D
  int num_blocks = 5;     // R
  int hidden = 160;       // per-direction LSTM width
  int enc_win = 32;
  int enc_hop = 16;
  int gn_groups = 1;
  double beta = 0.1;
  double contrastive_weight = 0.1;
  Variant variant = Variant::kSeanet;
  MultimodalVariant mm_variant = MultimodalVariant::kNone;
  bool share_av_projections = false;
  FusionCombine fusion_combine = FusionCombine::kSum;
  UpsampleMode upsample = UpsampleMode::kNearest;
  // Lip front-end + temporal stack; when false the network consumes
  // precomputed (L x D_v) visual embeddings.
  bool visual_frontend = true;
  int frontend_channels = 32;
  int vtcn_blocks = 5;
  uint64_t seed = 1;

  void validate() const {
    auto fail = [](const std::string& m) { throw std::invalid_argument("NetworkConfig: " + m); };
    if (chunk_len < 2 || chunk_len % 2 != 0) fail("chunk_len must be even and >= 2");
    if (num_blocks < 1) fail("num_blocks must be >= 1");
    if (audio_dim < 1 || visual_dim < 1 || feature_dim < 1 || hidden < 1) fail("dimensions must be positive");
    if (enc_win < 1 || enc_hop < 1 || enc_hop > enc_win) fail("encoder window/hop invalid");
    if (feature_dim % gn_groups != 0) fail("feature_dim must be divisible by gn_groups");
    if (beta < 0.0) fail("beta must be >= 0");
    if (mm_variant != MultimodalVariant::kNone && !has_noise_branch(variant))
      fail("multimodal variant " + to_string(mm_variant) + " needs a noise branch, variant " +
           to_string(variant) + " has none");
    if (mm_variant == MultimodalVariant::kPsnl && variant == Variant::kAlpha)
      fail("P variant is inserted before block extractors, which ALPHA removes");
  }

  /// Desk-scale network used by tests and the ablation harness.
  static NetworkConfig tiny() {
    NetworkConfig c;
    c.chunk_len = 20;
    c.audio_dim = 64;
    c.visual_dim = 16;
    c.feature_dim = 16;
    c.num_blocks = 2;
    c.hidden = 16;
    c.visual_frontend = false;
    return c;
  }
};

inline nlohmann::json to_json(const NetworkConfig& c) {
  return {{"chunk_len", c.chunk_len},
          {"audio_dim", c.audio_dim},
          {"visual_dim", c.visual_dim},
          {"feature_dim", c.feature_dim},
          {"num_blocks", c.num_blocks},
          {"hidden", c.hidden},
          {"enc_win", c.enc_win},
          {"enc_hop", c.enc_hop},
          {"gn_groups", c.gn_groups},
          {"beta", c.beta},
          {"contrastive_weight", c.contrastive_weight},
          {"variant", to_string(c.variant)},
          {"mm_variant", to_string(c.mm_variant)},
          {"share_av_projections", c.share_av_projections},
          {"fusion_combine", c.fusion_combine == FusionCombine::kSum ? "sum" : "concat"},
          {"upsample", c.upsample == UpsampleMode::kNearest ? "nearest" : "linear"},
          {"visual_frontend", c.visual_frontend},
          {"frontend_channels", c.frontend_channels},
          {"vtcn_blocks", c.vtcn_blocks},
          {"seed", c.seed}};
}

/// Missing keys keep their defaults; unknown keys are rejected. An optional
/// "preset" ("default" or "tiny") selects the base configuration.
inline NetworkConfig network_config_from_json(const nlohmann::json& j, NetworkConfig c = {}) {
  if (j.contains("preset")) {
    const auto p = j["preset"].get<std::string>();
    if (p == "tiny") c = NetworkConfig::tiny();
    else if (p == "default") c = NetworkConfig{};
    else throw std::invalid_argument("NetworkConfig: unknown preset \"" + p + "\" (expected default|tiny)");
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    const auto& v = it.value();
    if (k == "preset") continue;
    if (k == "chunk_len") c.chunk_len = v.get<int>();
    else if (k == "audio_dim") c.audio_dim = v.get<int>();
    else if (k == "visual_dim") c.visual_dim = v.get<int>();
    else if (k == "feature_dim") c.feature_dim = v.get<int>();
    else if (k == "num_blocks") c.num_blocks = v.get<int>();
    else if (k == "hidden") c.hidden = v.get<int>();
    else if (k == "enc_win") c.enc_win = v.get<int>();
    else if (k == "enc_hop") c.enc_hop = v.get<int>();
    else if (k == "gn_groups") c.gn_groups = v.get<int>();
    else if (k == "beta") c.beta = v.get<double>();
    else if (k == "contrastive_weight") c.contrastive_weight = v.get<double>();
    else if (k == "variant") c.variant = parse_variant(v.get<std::string>());
    else if (k == "mm_variant") c.mm_variant = parse_mm_variant(v.get<std::string>());
    else if (k == "share_av_projections") c.share_av_projections = v.get<bool>();
    else if (k == "fusion_combine") {
      const auto s = v.get<std::string>();
      if (s != "sum" && s != "concat") throw std::invalid_argument("fusion_combine must be sum or concat");
      c.fusion_combine = s == "sum" ? FusionCombine::kSum : FusionCombine::kConcat;
    } else if (k == "upsample") {
      const auto s = v.get<std::string>();
      if (s != "nearest" && s != "linear") throw std::invalid_argument("upsample must be nearest or linear");
      c.upsample = s == "nearest" ? UpsampleMode::kNearest : UpsampleMode::kLinear;
    } else if (k == "visual_frontend") c.visual_frontend = v.get<bool>();
    else if (k == "frontend_channels") c.frontend_channels = v.get<int>();
    else if (k == "vtcn_blocks") c.vtcn_blocks = v.get<int>();
    else if (k == "seed") c.seed = v.get<uint64_t>();
    else throw std::invalid_argument("NetworkConfig: unknown key \"" + k + "\"");
  }
  c.validate();
  return c;
}

}  // namespace seanet

#endif  // SEANET_NN_CONFIG_HPP_
