// Copyright 2026 The seanet-cpp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Fused recurrent and attention operations with hand-written backward
// passes. Both run over a batch of equal-length sequences that are laid out
// inside one frame-major matrix; SequenceLayout says which row holds step t
// of sequence j, so the same kernels serve the intra-chunk axis, the
// inter-chunk axis and plain full-length sequences without copies.

#ifndef SEANET_CORE_SEQUENCE_OPS_HPP_
#define SEANET_CORE_SEQUENCE_OPS_HPP_

#include <cmath>
#include <vector>

#include "seanet/core/ops.hpp"

namespace seanet {

struct SequenceLayout {
  Index num_seqs = 1;
  Index seq_len = 0;
  Index seq_stride = 0;
  Index time_stride = 1;

  Index row(Index seq, Index t) const { return seq * seq_stride + t * time_stride; }
  Index total_rows() const { return num_seqs * seq_len; }

  static SequenceLayout whole(Index length) { return {1, length, 0, 1}; }
};

namespace detail {

template <typename T>
void gather_step(const Matrix<T>& src, const SequenceLayout& lay, Index t, Matrix<T>& dst) {
  dst.resize(lay.num_seqs, src.cols());
  for (Index j = 0; j < lay.num_seqs; ++j) dst.row(j) = src.row(lay.row(j, t));
}

template <typename T>
void scatter_step(const Matrix<T>& src, const SequenceLayout& lay, Index t, Matrix<T>& dst) {
  for (Index j = 0; j < lay.num_seqs; ++j) dst.row(lay.row(j, t)) = src.row(j);
}

template <typename T>
inline T sigmoid(T x) {
  return T(1) / (T(1) + std::exp(-x));
}

}  // namespace detail

/// Single-direction LSTM over every sequence of `layout`. Gate order is
/// (input, forget, cell, output). w_ih: (4H x Din), w_hh: (4H x H),
/// bias: (1 x 4H). Returns the (N x H) hidden states in input row order.
template <typename T>
Var<T> lstm(const Var<T>& x, const Var<T>& w_ih, const Var<T>& w_hh, const Var<T>& bias,
            const SequenceLayout& layout, bool reverse) {
  const Index h = w_hh.cols();
  detail::check(w_ih.rows() == 4 * h && w_hh.rows() == 4 * h, "lstm: weight shapes");
  detail::check(w_ih.cols() == x.cols(), "lstm: input width mismatch");
  detail::check(bias.rows() == 1 && bias.cols() == 4 * h, "lstm: bias shape");
  detail::check(layout.total_rows() == x.rows(), "lstm: layout does not cover input");
  const Index n = x.rows(), len = layout.seq_len, ns = layout.num_seqs;

  Matrix<T> xw = x.value() * w_ih.value().transpose();
  xw.rowwise() += bias.value().row(0);

  Matrix<T> gates(n, 4 * h);  // activated gates
  Matrix<T> cells(n, h);
  Matrix<T> hidden(n, h);
  Matrix<T> h_prev = Matrix<T>::Zero(ns, h), c_prev = Matrix<T>::Zero(ns, h);
  Matrix<T> g_step, whh_t = w_hh.value().transpose();
  for (Index s = 0; s < len; ++s) {
    const Index t = reverse ? len - 1 - s : s;
    detail::gather_step(xw, layout, t, g_step);
    g_step.noalias() += h_prev * whh_t;
    auto a = g_step.array();
    a.leftCols(2 * h) = a.leftCols(2 * h).unaryExpr([](T v) { return detail::sigmoid(v); });
    a.middleCols(2 * h, h) = a.middleCols(2 * h, h).tanh();
    a.rightCols(h) = a.rightCols(h).unaryExpr([](T v) { return detail::sigmoid(v); });
    Matrix<T> c = a.middleCols(h, h) * c_prev.array() + a.leftCols(h) * a.middleCols(2 * h, h);
    Matrix<T> hh = a.rightCols(h) * c.array().tanh();
    detail::scatter_step(g_step, layout, t, gates);
    detail::scatter_step(c, layout, t, cells);
    detail::scatter_step(hh, layout, t, hidden);
    h_prev = std::move(hh);
    c_prev = std::move(c);
  }
  Matrix<T> out = hidden;
  return make_op<T>(
      std::move(out), {x, w_ih, w_hh, bias},
      [gates = std::move(gates), cells = std::move(cells), hidden = std::move(hidden), layout,
       reverse, h](Node<T>& node) {
        const auto& xv = node.parents[0]->value;
        const auto& wih = node.parents[1]->value;
        const auto& whh = node.parents[2]->value;
        const Index n = xv.rows(), len = layout.seq_len, ns = layout.num_seqs;
        Matrix<T> dxw(n, 4 * h);
        Matrix<T> dwhh = Matrix<T>::Zero(4 * h, h);
        Matrix<T> dh_next = Matrix<T>::Zero(ns, h), dc_next = Matrix<T>::Zero(ns, h);
        Matrix<T> gt, ct, cprev(ns, h), hprev(ns, h), dout, dg(ns, 4 * h);
        for (Index s = len - 1; s >= 0; --s) {
          const Index t = reverse ? len - 1 - s : s;
          const bool first = s == 0;
          const Index tp = reverse ? t + 1 : t - 1;
          detail::gather_step(gates, layout, t, gt);
          detail::gather_step(cells, layout, t, ct);
          detail::gather_step(node.grad, layout, t, dout);
          if (first) {
            cprev.setZero();
            hprev.setZero();
          } else {
            detail::gather_step(cells, layout, tp, cprev);
            detail::gather_step(hidden, layout, tp, hprev);
          }
          auto ga = gt.array();
          auto i = ga.leftCols(h);
          auto f = ga.middleCols(h, h);
          auto g = ga.middleCols(2 * h, h);
          auto o = ga.rightCols(h);
          Eigen::Array<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> tc = ct.array().tanh();
          auto dh = dout.array() + dh_next.array();
          Eigen::Array<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> dc =
              dh * o * (T(1) - tc.square()) + dc_next.array();
          auto dga = dg.array();
          dga.leftCols(h) = dc * g * i * (T(1) - i);
          dga.middleCols(h, h) = dc * cprev.array() * f * (T(1) - f);
          dga.middleCols(2 * h, h) = dc * i * (T(1) - g.square());
          dga.rightCols(h) = dh * tc * o * (T(1) - o);
          dc_next = (dc * f).matrix();
          detail::scatter_step(dg, layout, t, dxw);
          if (!first) dwhh.noalias() += dg.transpose() * hprev;
          dh_next.noalias() = dg * whh;
        }
        if (wants_grad(node, 0)) push_grad(node, 0, (dxw * wih).eval());
        if (wants_grad(node, 1)) push_grad(node, 1, (dxw.transpose() * xv).eval());
        if (wants_grad(node, 2)) push_grad(node, 2, dwhh);
        if (wants_grad(node, 3)) push_grad(node, 3, dxw.colwise().sum().eval());
      });
}

/// Row-wise softmax of sign * scale * (q_g k_g^T) for one sequence group.
template <typename T>
Matrix<T> attention_probs(const Matrix<T>& q, const Matrix<T>& k, T sign, T scale) {
  Matrix<T> s = (q * k.transpose()) * (sign * scale);
  for (Index r = 0; r < s.rows(); ++r) {
    const T m = s.row(r).maxCoeff();
    s.row(r) = (s.row(r).array() - m).exp();
    s.row(r) /= s.row(r).sum();
  }
  return s;
}

/// Score matrices of every group, without building a graph.
template <typename T>
std::vector<Matrix<T>> attention_scores(const Matrix<T>& q, const Matrix<T>& k,
                                        const SequenceLayout& layout, T sign, T scale) {
  std::vector<Matrix<T>> out;
  out.reserve(static_cast<size_t>(layout.num_seqs));
  Matrix<T> qg(layout.seq_len, q.cols()), kg(layout.seq_len, k.cols());
  for (Index j = 0; j < layout.num_seqs; ++j) {
    for (Index t = 0; t < layout.seq_len; ++t) {
      qg.row(t) = q.row(layout.row(j, t));
      kg.row(t) = k.row(layout.row(j, t));
    }
    out.push_back(attention_probs<T>(qg, kg, sign, scale));
  }
  return out;
}

/// Grouped single-head attention: for each sequence of `layout`,
/// softmax(sign * scale * Q K^T) V. Rows outside the groups are untouched
/// (zero). q, k, v are (N x d), (N x d), (N x dv).
template <typename T>
Var<T> attention(const Var<T>& q, const Var<T>& k, const Var<T>& v, const SequenceLayout& layout,
                 T sign, T scale) {
  detail::check(q.rows() == k.rows() && k.rows() == v.rows(), "attention: row mismatch");
  detail::check(q.cols() == k.cols(), "attention: query/key width mismatch");
  detail::check(layout.total_rows() == q.rows(), "attention: layout does not cover input");
  const Index len = layout.seq_len, ns = layout.num_seqs;
  std::vector<Matrix<T>> probs = attention_scores<T>(q.value(), k.value(), layout, sign, scale);
  Matrix<T> out = Matrix<T>::Zero(v.rows(), v.cols());
  Matrix<T> vg(len, v.cols());
  for (Index j = 0; j < ns; ++j) {
    for (Index t = 0; t < len; ++t) vg.row(t) = v.value().row(layout.row(j, t));
    Matrix<T> og = probs[j] * vg;
    for (Index t = 0; t < len; ++t) out.row(layout.row(j, t)) = og.row(t);
  }
  return make_op<T>(
      std::move(out), {q, k, v},
      [probs = std::move(probs), layout, sign, scale](Node<T>& node) {
        const auto& qv = node.parents[0]->value;
        const auto& kv = node.parents[1]->value;
        const auto& vv = node.parents[2]->value;
        const Index len = layout.seq_len;
        Matrix<T> dq = Matrix<T>::Zero(qv.rows(), qv.cols());
        Matrix<T> dk = Matrix<T>::Zero(kv.rows(), kv.cols());
        Matrix<T> dv = Matrix<T>::Zero(vv.rows(), vv.cols());
        Matrix<T> qg(len, qv.cols()), kg(len, kv.cols()), vg(len, vv.cols()), dog(len, vv.cols());
        for (Index j = 0; j < layout.num_seqs; ++j) {
          for (Index t = 0; t < len; ++t) {
            const Index r = layout.row(j, t);
            qg.row(t) = qv.row(r);
            kg.row(t) = kv.row(r);
            vg.row(t) = vv.row(r);
            dog.row(t) = node.grad.row(r);
          }
          const Matrix<T>& a = probs[j];
          Matrix<T> dvg = a.transpose() * dog;
          Matrix<T> da = dog * vg.transpose();
          Matrix<T> ds = a.cwiseProduct(da);
          Eigen::Matrix<T, Eigen::Dynamic, 1> rs = ds.rowwise().sum();
          ds -= (a.array().colwise() * rs.array()).matrix();
          ds *= sign * scale;
          Matrix<T> dqg = ds * kg;
          Matrix<T> dkg = ds.transpose() * qg;
          for (Index t = 0; t < len; ++t) {
            const Index r = layout.row(j, t);
            dq.row(r) += dqg.row(t);
            dk.row(r) += dkg.row(t);
            dv.row(r) += dvg.row(t);
          }
        }
        push_grad(node, 0, dq);
        push_grad(node, 1, dk);
        push_grad(node, 2, dv);
      });
}

}  // namespace seanet

#endif  // SEANET_CORE_SEQUENCE_OPS_HPP_
