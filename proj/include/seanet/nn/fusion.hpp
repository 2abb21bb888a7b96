// Copyright 2026 The seanet-cpp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Audio-visual fusion and the overlapping chunk segmentation.
//
// A chunked embedding stores P chunks of K frames as a (P*K x D) matrix,
// row p*K + k holding frame p*K/2 + k of the (tail zero-padded) sequence.
// aggregate() divides every frame by the number of chunks that cover it, so
// aggregate(segment(E)) == E.

#ifndef SEANET_NN_FUSION_HPP_
#define SEANET_NN_FUSION_HPP_

#include <stdexcept>
#include <string>
#include <vector>

#include "seanet/nn/config.hpp"
#include "seanet/nn/layers.hpp"

namespace seanet {

struct ChunkGeometry {
  Index length = 0;  // L, frames before padding
  Index chunk = 0;   // K
  Index count = 0;   // P
  Index pad = 0;     // zero frames appended at the tail

  Index hop() const { return chunk / 2; }
  Index rows() const { return chunk * count; }
  SequenceLayout intra() const { return {count, chunk, chunk, 1}; }
  SequenceLayout inter() const { return {chunk, count, 1, chunk}; }

  static ChunkGeometry make(Index length, Index chunk) {
    if (chunk < 2 || chunk % 2 != 0) throw std::invalid_argument("segment: K must be even and >= 2");
    if (length < 1) throw std::invalid_argument("segment: empty sequence");
    ChunkGeometry g;
    g.length = length;
    g.chunk = chunk;
    const Index hop = chunk / 2;
    const Index excess = std::max<Index>(length - chunk, 0);
    g.count = (excess + hop - 1) / hop + 1;
    g.pad = (g.count - 1) * hop + chunk - length;
    return g;
  }

  /// Source frame of chunk row p*K + k, or -1 for padding.
  std::vector<Index> source_frames() const {
    std::vector<Index> idx(static_cast<size_t>(rows()));
    for (Index p = 0; p < count; ++p)
      for (Index k = 0; k < chunk; ++k) {
        const Index f = p * hop() + k;
        idx[static_cast<size_t>(p * chunk + k)] = f < length ? f : -1;
      }
    return idx;
  }

  std::vector<Index> coverage() const {
    std::vector<Index> cnt(static_cast<size_t>(length), 0);
    for (Index f : source_frames())
      if (f >= 0) ++cnt[static_cast<size_t>(f)];
    return cnt;
  }
};

template <typename T>
struct ChunkedEmbedding {
  Var<T> data;  // (P*K x D)
  ChunkGeometry geom;
};

template <typename T>
ChunkedEmbedding<T> segment(const Var<T>& e, Index chunk) {
  ChunkGeometry g = ChunkGeometry::make(e.rows(), chunk);
  return {gather_rows(e, g.source_frames()), g};
}

template <typename T>
Var<T> aggregate(const Var<T>& chunks, const ChunkGeometry& g) {
  if (chunks.rows() != g.rows()) throw std::invalid_argument("aggregate: chunk tensor does not match geometry");
  std::vector<Index> idx = g.source_frames();
  std::vector<Index> cnt = g.coverage();
  std::vector<T> w(idx.size(), T(0));
  for (size_t i = 0; i < idx.size(); ++i)
    if (idx[i] >= 0) w[i] = T(1) / T(cnt[static_cast<size_t>(idx[i])]);
  return scatter_rows(chunks, std::move(idx), std::move(w), g.length);
}

template <typename T>
Var<T> aggregate(const ChunkedEmbedding<T>& c) {
  return aggregate(c.data, c.geom);
}

/// GN + projection of the audio embedding, per-frame concatenation with the
/// visual embedding and a final projection to D.
template <typename T>
struct Fusion {
  GroupNorm<T> norm;
  Linear<T> audio_proj;
  Linear<T> out_proj;

  Fusion() = default;
  Fusion(ParameterStore<T>& store, const std::string& name, const NetworkConfig& cfg)
      : norm(store, name + ".norm", cfg.audio_dim),
        audio_proj(store, name + ".audio_proj", cfg.audio_dim, cfg.feature_dim),
        out_proj(store, name + ".out_proj", cfg.feature_dim + cfg.visual_dim, cfg.feature_dim) {}

  /// Audio branch alone: GN then projection, (L x D).
  Var<T> audio_features(const Var<T>& x) const { return audio_proj(norm(x)); }

  Var<T> combine(const Var<T>& audio_features, const Var<T>& v) const {
    if (audio_features.rows() != v.rows())
      throw std::invalid_argument("fuse: audio has " + std::to_string(audio_features.rows()) +
                                  " frames, visual has " + std::to_string(v.rows()));
    return out_proj(concat_cols(audio_features, v));
  }

  Var<T> operator()(const Var<T>& x, const Var<T>& v) const {
    if (x.rows() != v.rows())
      throw std::invalid_argument("fuse: audio has " + std::to_string(x.rows()) + " frames, visual has " +
                                  std::to_string(v.rows()));
    return combine(audio_features(x), v);
  }
};

}  // namespace seanet

#endif  // SEANET_NN_FUSION_HPP_
