// Copyright 2026 The seanet-cpp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SEANET_NN_DPRNN_HPP_
#define SEANET_NN_DPRNN_HPP_

#include <string>

#include "seanet/nn/fusion.hpp"
#include "seanet/nn/layers.hpp"

namespace seanet {

/// One recurrent pass: x + GN(Linear(BLSTM(x))) along a layout.
template <typename T>
struct DualPathPass {
  BiLstm<T> rnn;
  Linear<T> proj;
  GroupNorm<T> norm;

  DualPathPass() = default;
  DualPathPass(ParameterStore<T>& store, const std::string& name, Index dim, Index hidden, int groups)
      : rnn(store, name + ".lstm", dim, hidden),
        proj(store, name + ".proj", 2 * hidden, dim),
        norm(store, name + ".norm", dim, groups) {}

  Var<T> operator()(const Var<T>& x, const SequenceLayout& layout) const {
    return add(x, norm(proj(rnn(x, layout))));
  }
};

/// Intra-chunk pass (sequence length K) followed by an inter-chunk pass
/// (sequence length P). Used for the pre-extractor, pre-suppressor and
/// every extractor/suppressor.
template <typename T>
struct DualPathUnit {
  DualPathPass<T> intra, inter;

  DualPathUnit() = default;
  DualPathUnit(ParameterStore<T>& store, const std::string& name, Index dim, Index hidden, int groups = 1)
      : intra(store, name + ".intra", dim, hidden, groups), inter(store, name + ".inter", dim, hidden, groups) {}

  Var<T> operator()(const Var<T>& chunks, const ChunkGeometry& g) const {
    return inter(intra(chunks, g.intra()), g.inter());
  }

  ChunkedEmbedding<T> operator()(const ChunkedEmbedding<T>& m) const { return {(*this)(m.data, m.geom), m.geom}; }
};

}  // namespace seanet

#endif  // SEANET_NN_DPRNN_HPP_
