// Copyright 2026 The seanet-cpp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SEANET_NN_LAYERS_HPP_
#define SEANET_NN_LAYERS_HPP_

#include <string>

#include "seanet/core/ops.hpp"
#include "seanet/core/parameters.hpp"
#include "seanet/core/sequence_ops.hpp"

namespace seanet {

/// Affine map over features (a kernel-size-1 convolution over time).
template <typename T>
struct Linear {
  Var<T> weight;  // (out x in)
  Var<T> bias;    // (1 x out), undefined when bias-free

  Linear() = default;
  Linear(ParameterStore<T>& store, const std::string& name, Index in, Index out, bool with_bias = true) {
    weight = store.create(name + ".weight", out, in, Init::kXavier);
    if (with_bias) bias = store.create(name + ".bias", 1, out, Init::kZeros);
  }

  Var<T> operator()(const Var<T>& x) const { return linear(x, weight, bias); }
  Index in_features() const { return weight.cols(); }
  Index out_features() const { return weight.rows(); }
};

template <typename T>
struct GroupNorm {
  Var<T> gamma, beta;
  int groups = 1;

  GroupNorm() = default;
  GroupNorm(ParameterStore<T>& store, const std::string& name, Index channels, int num_groups = 1)
      : groups(num_groups) {
    gamma = store.create(name + ".gamma", 1, channels, Init::kOnes);
    beta = store.create(name + ".beta", 1, channels, Init::kZeros);
  }

  Var<T> operator()(const Var<T>& x) const { return group_norm(x, gamma, beta, groups); }
};

template <typename T>
struct LstmDirection {
  Var<T> w_ih, w_hh, bias;

  LstmDirection() = default;
  LstmDirection(ParameterStore<T>& store, const std::string& name, Index in, Index hidden) {
    w_ih = store.create(name + ".w_ih", 4 * hidden, in, Init::kXavier);
    w_hh = store.create(name + ".w_hh", 4 * hidden, hidden, Init::kOrthogonal);
    bias = store.create(name + ".bias", 1, 4 * hidden, Init::kZeros);
  }
};

/// Bidirectional LSTM; output width is 2 * hidden.
template <typename T>
struct BiLstm {
  LstmDirection<T> fwd, bwd;

  BiLstm() = default;
  BiLstm(ParameterStore<T>& store, const std::string& name, Index in, Index hidden)
      : fwd(store, name + ".fwd", in, hidden), bwd(store, name + ".bwd", in, hidden) {}

  Var<T> operator()(const Var<T>& x, const SequenceLayout& layout) const {
    Var<T> f = lstm(x, fwd.w_ih, fwd.w_hh, fwd.bias, layout, false);
    Var<T> b = lstm(x, bwd.w_ih, bwd.w_hh, bwd.bias, layout, true);
    return concat_cols(f, b);
  }
};

}  // namespace seanet

#endif  // SEANET_NN_LAYERS_HPP_
