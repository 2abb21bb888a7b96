// Copyright 2026 The seanet-cpp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Speech/noise interaction attention.
//
// Each branch owns four projections: value V, self query Q, key K and cross
// query Q'. For the speech branch in the full mode
//
//   A_s  = 1/2 (softmax(Q_s K_s^T / sqrt(D)) + softmax(-Q'_n K_s^T / sqrt(D)))
//   F'_s = A_s V_s + F_s
//
// and the noise branch mirrors it with the roles of s and n swapped. The
// other modes select the ablation structures (see AttentionMode).

#ifndef SEANET_NN_REVERSE_ATTENTION_HPP_
#define SEANET_NN_REVERSE_ATTENTION_HPP_

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "seanet/nn/config.hpp"
#include "seanet/nn/layers.hpp"

namespace seanet {

/// Row-stochastic score matrices of one group: the self term, the cross
/// term and the matrix actually applied to the values.
template <typename T>
struct AttentionScores {
  std::vector<Matrix<T>> plus;   // empty when the mode has no self term
  std::vector<Matrix<T>> minus;  // empty when the mode has no cross term
  std::vector<Matrix<T>> combined;
};

inline bool uses_self_term(AttentionMode m) {
  return m == AttentionMode::kFull || m == AttentionMode::kSelfOnly || m == AttentionMode::kBothPositive ||
         m == AttentionMode::kGamma;
}

inline bool uses_cross_term(AttentionMode m) { return m != AttentionMode::kSelfOnly; }

template <typename T>
struct AttentionBranch {
  Linear<T> value, query, key, cross_query;
  AttentionMode mode = AttentionMode::kFull;

  AttentionBranch() = default;
  AttentionBranch(ParameterStore<T>& store, const std::string& name, Index dim, AttentionMode m, bool needs_cross_query)
      : mode(m) {
    value = Linear<T>(store, name + ".value", dim, dim);
    key = Linear<T>(store, name + ".key", dim, dim);
    if (uses_self_term(m)) query = Linear<T>(store, name + ".query", dim, dim);
    if (needs_cross_query) cross_query = Linear<T>(store, name + ".cross_query", dim, dim);
  }
};

template <typename T>
class ReverseAttention {
 public:
  ReverseAttention() = default;

  /// `two_branch` adds the noise branch. `noise_self` keeps noise-noise
  /// self-attention in the noise branch (false drops it, leaving only the
  /// reverse cross term there).
  ReverseAttention(ParameterStore<T>& store, const std::string& name, Index dim, AttentionMode mode,
                   bool two_branch, bool noise_self = true)
      : dim_(dim), two_branch_(two_branch) {
    const bool cross = two_branch && uses_cross_term(mode);
    if (!two_branch && uses_cross_term(mode))
      throw std::invalid_argument("reverse attention: cross modes need a noise branch");
    noise_mode_ = noise_self ? mode : AttentionMode::kCrossReverse;
    speech_ = AttentionBranch<T>(store, name + ".speech", dim, mode, cross);
    if (two_branch) noise_ = AttentionBranch<T>(store, name + ".noise", dim, noise_mode_, cross);
  }

  bool two_branch() const { return two_branch_; }
  AttentionBranch<T>& speech() { return speech_; }
  AttentionBranch<T>& noise() { return noise_; }
  const AttentionBranch<T>& speech() const { return speech_; }
  const AttentionBranch<T>& noise() const { return noise_; }

  /// Returns (F'_s, F'_n); F'_n is undefined for a single-branch module.
  std::pair<Var<T>, Var<T>> operator()(const Var<T>& fs, const Var<T>& fn, const SequenceLayout& layout) const {
    if (two_branch_ && (fs.rows() != fn.rows() || fs.cols() != fn.cols()))
      throw std::invalid_argument("reverse attention: speech/noise shape mismatch");
    if (fs.cols() != dim_) throw std::invalid_argument("reverse attention: feature width mismatch");
    if (!two_branch_) return {branch(speech_, fs, Var<T>(), layout), Var<T>()};
    // Cross queries come from the opposite branch.
    Var<T> q_cross_from_noise = noise_.cross_query.weight.defined() ? noise_.cross_query(fn) : Var<T>();
    Var<T> q_cross_from_speech = speech_.cross_query.weight.defined() ? speech_.cross_query(fs) : Var<T>();
    return {branch(speech_, fs, q_cross_from_noise, layout), branch(noise_, fn, q_cross_from_speech, layout)};
  }

  /// Score matrices of the speech (or noise) branch, computed without a graph.
  AttentionScores<T> scores(const Matrix<T>& fs, const Matrix<T>& fn, const SequenceLayout& layout,
                            bool noise_branch = false) const {
    NoGradGuard guard;
    const AttentionBranch<T>& b = noise_branch ? noise_ : speech_;
    const AttentionBranch<T>& other = noise_branch ? speech_ : noise_;
    const Matrix<T>& own = noise_branch ? fn : fs;
    const Matrix<T>& opp = noise_branch ? fs : fn;
    Var<T> x(own);
    Var<T> k = b.key(x);
    Var<T> q = b.query.weight.defined() ? b.query(x) : Var<T>();
    Var<T> qc = other.cross_query.weight.defined() ? other.cross_query(Var<T>(opp)) : Var<T>();
    const T sc = inv_sqrt_dim();
    AttentionScores<T> out;
    switch (b.mode) {
      case AttentionMode::kGamma:
        out.plus = attention_scores<T>(q.value(), k.value(), layout, T(1), sc);
        out.minus = attention_scores<T>(qc.value(), k.value(), layout, T(-1), sc);
        out.combined = attention_scores<T>(Matrix<T>(q.value() - qc.value()), k.value(), layout, T(1), sc);
        return out;
      case AttentionMode::kSelfOnly:
        out.plus = attention_scores<T>(q.value(), k.value(), layout, T(1), sc);
        out.combined = out.plus;
        return out;
      case AttentionMode::kCrossPositive:
      case AttentionMode::kCrossReverse:
        out.minus = attention_scores<T>(qc.value(), k.value(), layout, cross_sign(b.mode), sc);
        out.combined = out.minus;
        return out;
      case AttentionMode::kFull:
      case AttentionMode::kBothPositive:
        out.plus = attention_scores<T>(q.value(), k.value(), layout, T(1), sc);
        out.minus = attention_scores<T>(qc.value(), k.value(), layout, cross_sign(b.mode), sc);
        for (size_t i = 0; i < out.plus.size(); ++i) out.combined.push_back(T(0.5) * (out.plus[i] + out.minus[i]));
        return out;
    }
    return out;
  }

  T inv_sqrt_dim() const { return T(1) / std::sqrt(static_cast<T>(dim_)); }

 private:
  static T cross_sign(AttentionMode m) {
    return (m == AttentionMode::kCrossPositive || m == AttentionMode::kBothPositive) ? T(1) : T(-1);
  }

  Var<T> branch(const AttentionBranch<T>& b, const Var<T>& f, const Var<T>& q_cross, const SequenceLayout& layout) const {
    Var<T> v = b.value(f);
    Var<T> k = b.key(f);
    const T sc = inv_sqrt_dim();
    Var<T> mixed;
    switch (b.mode) {
      case AttentionMode::kSelfOnly:
        mixed = attention(b.query(f), k, v, layout, T(1), sc);
        break;
      case AttentionMode::kCrossPositive:
      case AttentionMode::kCrossReverse:
        mixed = attention(q_cross, k, v, layout, cross_sign(b.mode), sc);
        break;
      case AttentionMode::kGamma:
        mixed = attention(sub(b.query(f), q_cross), k, v, layout, T(1), sc);
        break;
      case AttentionMode::kFull:
      case AttentionMode::kBothPositive: {
        Var<T> self = attention(b.query(f), k, v, layout, T(1), sc);
        Var<T> cross = attention(q_cross, k, v, layout, cross_sign(b.mode), sc);
        mixed = scale(add(self, cross), T(0.5));
        break;
      }
    }
    return add(mixed, f);
  }

  AttentionBranch<T> speech_, noise_;
  AttentionMode noise_mode_ = AttentionMode::kFull;
  Index dim_ = 0;
  bool two_branch_ = false;
};

}  // namespace seanet

#endif  // SEANET_NN_REVERSE_ATTENTION_HPP_
