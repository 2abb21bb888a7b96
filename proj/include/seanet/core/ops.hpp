// Copyright 2026 The seanet-cpp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Differentiable building blocks. Shapes follow the frame-major convention
// of tensor.hpp: rows are time steps, columns are features.

#ifndef SEANET_CORE_OPS_HPP_
#define SEANET_CORE_OPS_HPP_

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "seanet/core/tensor.hpp"

namespace seanet {

namespace detail {
inline void check(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}
}  // namespace detail

template <typename T>
Var<T> add(const Var<T>& a, const Var<T>& b) {
  detail::check(a.rows() == b.rows() && a.cols() == b.cols(), "add: shape mismatch");
  return make_op<T>(a.value() + b.value(), {a, b}, [](Node<T>& out) {
    push_grad(out, 0, out.grad);
    push_grad(out, 1, out.grad);
  });
}

template <typename T>
Var<T> sub(const Var<T>& a, const Var<T>& b) {
  detail::check(a.rows() == b.rows() && a.cols() == b.cols(), "sub: shape mismatch");
  return make_op<T>(a.value() - b.value(), {a, b}, [](Node<T>& out) {
    push_grad(out, 0, out.grad);
    if (wants_grad(out, 1)) push_grad(out, 1, (-out.grad).eval());
  });
}

template <typename T>
Var<T> scale(const Var<T>& a, T c) {
  return make_op<T>(a.value() * c, {a}, [c](Node<T>& out) {
    push_grad(out, 0, (out.grad * c).eval());
  });
}

/// Elementwise product.
template <typename T>
Var<T> mul(const Var<T>& a, const Var<T>& b) {
  detail::check(a.rows() == b.rows() && a.cols() == b.cols(), "mul: shape mismatch");
  return make_op<T>(a.value().cwiseProduct(b.value()), {a, b}, [](Node<T>& out) {
    const auto& av = out.parents[0]->value;
    const auto& bv = out.parents[1]->value;
    if (wants_grad(out, 0)) push_grad(out, 0, out.grad.cwiseProduct(bv).eval());
    if (wants_grad(out, 1)) push_grad(out, 1, out.grad.cwiseProduct(av).eval());
  });
}

/// Sum of a list of same-shaped values (one node instead of a chain).
template <typename T>
Var<T> sum(const std::vector<Var<T>>& xs) {
  detail::check(!xs.empty(), "sum: empty list");
  Matrix<T> acc = xs.front().value();
  for (size_t i = 1; i < xs.size(); ++i) {
    detail::check(xs[i].rows() == acc.rows() && xs[i].cols() == acc.cols(), "sum: shape mismatch");
    acc += xs[i].value();
  }
  return make_op<T>(std::move(acc), xs, [n = xs.size()](Node<T>& out) {
    for (size_t i = 0; i < n; ++i) push_grad(out, i, out.grad);
  });
}

template <typename T>
Var<T> matmul(const Var<T>& a, const Var<T>& b) {
  detail::check(a.cols() == b.rows(), "matmul: inner dimension mismatch");
  return make_op<T>(a.value() * b.value(), {a, b}, [](Node<T>& out) {
    const auto& av = out.parents[0]->value;
    const auto& bv = out.parents[1]->value;
    if (wants_grad(out, 0)) push_grad(out, 0, (out.grad * bv.transpose()).eval());
    if (wants_grad(out, 1)) push_grad(out, 1, (av.transpose() * out.grad).eval());
  });
}

/// y = x W^T (+ b). W is (out x in), b is (1 x out) or undefined.
template <typename T>
Var<T> linear(const Var<T>& x, const Var<T>& w, const Var<T>& b = Var<T>()) {
  detail::check(x.cols() == w.cols(), "linear: input width " + std::to_string(x.cols()) +
                                          " != weight width " + std::to_string(w.cols()));
  Matrix<T> y = x.value() * w.value().transpose();
  std::vector<Var<T>> parents{x, w};
  if (b.defined()) {
    detail::check(b.rows() == 1 && b.cols() == w.rows(), "linear: bias shape");
    y.rowwise() += b.value().row(0);
    parents.push_back(b);
  }
  bool has_bias = b.defined();
  return make_op<T>(std::move(y), std::move(parents), [has_bias](Node<T>& out) {
    const auto& xv = out.parents[0]->value;
    const auto& wv = out.parents[1]->value;
    if (wants_grad(out, 0)) push_grad(out, 0, (out.grad * wv).eval());
    if (wants_grad(out, 1)) push_grad(out, 1, (out.grad.transpose() * xv).eval());
    if (has_bias && wants_grad(out, 2)) push_grad(out, 2, out.grad.colwise().sum().eval());
  });
}

/// Adds a (1 x C) row to every row of x.
template <typename T>
Var<T> add_row(const Var<T>& x, const Var<T>& row) {
  detail::check(row.rows() == 1 && row.cols() == x.cols(), "add_row: shape mismatch");
  Matrix<T> y = x.value();
  y.rowwise() += row.value().row(0);
  return make_op<T>(std::move(y), {x, row}, [](Node<T>& out) {
    push_grad(out, 0, out.grad);
    if (wants_grad(out, 1)) push_grad(out, 1, out.grad.colwise().sum().eval());
  });
}

/// Multiplies every row of x by a (1 x C) row, elementwise.
template <typename T>
Var<T> mul_row(const Var<T>& x, const Var<T>& row) {
  detail::check(row.rows() == 1 && row.cols() == x.cols(), "mul_row: shape mismatch");
  Matrix<T> y = x.value().array().rowwise() * row.value().row(0).array();
  return make_op<T>(std::move(y), {x, row}, [](Node<T>& out) {
    const auto& xv = out.parents[0]->value;
    const auto& rv = out.parents[1]->value;
    if (wants_grad(out, 0)) {
      Matrix<T> g = out.grad.array().rowwise() * rv.row(0).array();
      push_grad(out, 0, g);
    }
    if (wants_grad(out, 1)) push_grad(out, 1, out.grad.cwiseProduct(xv).colwise().sum().eval());
  });
}

template <typename T>
Var<T> relu(const Var<T>& x) {
  return make_op<T>(x.value().cwiseMax(T(0)), {x}, [](Node<T>& out) {
    const auto& xv = out.parents[0]->value;
    Matrix<T> g = (xv.array() > T(0)).select(out.grad, T(0));
    push_grad(out, 0, g);
  });
}

/// Parametric ReLU. `alpha` is (1 x 1) shared or (1 x C) per channel.
template <typename T>
Var<T> prelu(const Var<T>& x, const Var<T>& alpha) {
  detail::check(alpha.rows() == 1 && (alpha.cols() == 1 || alpha.cols() == x.cols()),
                "prelu: alpha shape");
  const bool shared = alpha.cols() == 1;
  Matrix<T> y = x.value();
  for (Index r = 0; r < y.rows(); ++r)
    for (Index c = 0; c < y.cols(); ++c) {
      T a = alpha.value()(0, shared ? 0 : c);
      if (y(r, c) < T(0)) y(r, c) *= a;
    }
  return make_op<T>(std::move(y), {x, alpha}, [shared](Node<T>& out) {
    const auto& xv = out.parents[0]->value;
    const auto& av = out.parents[1]->value;
    Matrix<T> gx(xv.rows(), xv.cols());
    Matrix<T> ga = Matrix<T>::Zero(1, av.cols());
    for (Index r = 0; r < xv.rows(); ++r)
      for (Index c = 0; c < xv.cols(); ++c) {
        const Index ac = shared ? 0 : c;
        if (xv(r, c) < T(0)) {
          gx(r, c) = out.grad(r, c) * av(0, ac);
          ga(0, ac) += out.grad(r, c) * xv(r, c);
        } else {
          gx(r, c) = out.grad(r, c);
        }
      }
    push_grad(out, 0, gx);
    push_grad(out, 1, ga);
  });
}

/// Group normalization over a frame-major sequence. Channels are split into
/// `groups` contiguous groups; statistics span every row and the group's
/// channels. gamma/beta are (1 x C).
template <typename T>
Var<T> group_norm(const Var<T>& x, const Var<T>& gamma, const Var<T>& beta, int groups = 1,
                  T eps = T(1e-8)) {
  const Index n = x.rows(), c = x.cols();
  detail::check(groups >= 1 && c % groups == 0, "group_norm: channels not divisible by groups");
  detail::check(gamma.cols() == c && beta.cols() == c, "group_norm: affine shape");
  const Index cg = c / groups;
  Matrix<T> xhat(n, c);
  std::vector<T> inv_std(groups);
  for (int g = 0; g < groups; ++g) {
    auto blk = x.value().middleCols(g * cg, cg);
    const T count = T(n * cg);
    const T mean = blk.sum() / count;
    const T var = (blk.array() - mean).square().sum() / count;
    inv_std[g] = T(1) / std::sqrt(var + eps);
    xhat.middleCols(g * cg, cg) = (blk.array() - mean) * inv_std[g];
  }
  Matrix<T> y = xhat.array().rowwise() * gamma.value().row(0).array();
  y.rowwise() += beta.value().row(0);
  return make_op<T>(std::move(y), {x, gamma, beta},
                    [xhat, inv_std, groups, cg](Node<T>& out) {
                      const auto& gv = out.parents[1]->value;
                      if (wants_grad(out, 1))
                        push_grad(out, 1, out.grad.cwiseProduct(xhat).colwise().sum().eval());
                      if (wants_grad(out, 2)) push_grad(out, 2, out.grad.colwise().sum().eval());
                      if (!wants_grad(out, 0)) return;
                      Matrix<T> dxhat = out.grad.array().rowwise() * gv.row(0).array();
                      Matrix<T> dx(dxhat.rows(), dxhat.cols());
                      for (int g = 0; g < groups; ++g) {
                        auto d = dxhat.middleCols(g * cg, cg);
                        auto xh = xhat.middleCols(g * cg, cg);
                        const T count = T(d.rows() * cg);
                        const T mean_d = d.sum() / count;
                        const T mean_dx = d.cwiseProduct(xh).sum() / count;
                        dx.middleCols(g * cg, cg) =
                            (d.array() - mean_d - xh.array() * mean_dx) * inv_std[g];
                      }
                      push_grad(out, 0, dx);
                    });
}

/// Joins two sequences feature-wise (same row count).
template <typename T>
Var<T> concat_cols(const Var<T>& a, const Var<T>& b) {
  detail::check(a.rows() == b.rows(), "concat_cols: row mismatch");
  Matrix<T> y(a.rows(), a.cols() + b.cols());
  y.leftCols(a.cols()) = a.value();
  y.rightCols(b.cols()) = b.value();
  const Index ca = a.cols();
  return make_op<T>(std::move(y), {a, b}, [ca](Node<T>& out) {
    if (wants_grad(out, 0)) push_grad(out, 0, out.grad.leftCols(ca).eval());
    if (wants_grad(out, 1)) push_grad(out, 1, out.grad.rightCols(out.grad.cols() - ca).eval());
  });
}

/// Selects rows by index; index -1 yields a zero row. Backward scatter-adds.
template <typename T>
Var<T> gather_rows(const Var<T>& x, std::vector<Index> idx) {
  Matrix<T> y = Matrix<T>::Zero(static_cast<Index>(idx.size()), x.cols());
  for (size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0) continue;
    detail::check(idx[i] < x.rows(), "gather_rows: index out of range");
    y.row(static_cast<Index>(i)) = x.value().row(idx[i]);
  }
  return make_op<T>(std::move(y), {x}, [idx = std::move(idx)](Node<T>& out) {
    const auto& xv = out.parents[0]->value;
    Matrix<T> g = Matrix<T>::Zero(xv.rows(), xv.cols());
    for (size_t i = 0; i < idx.size(); ++i)
      if (idx[i] >= 0) g.row(idx[i]) += out.grad.row(static_cast<Index>(i));
    push_grad(out, 0, g);
  });
}

/// out[idx[i]] += weight[i] * x[i] for every row i with idx[i] >= 0.
template <typename T>
Var<T> scatter_rows(const Var<T>& x, std::vector<Index> idx, std::vector<T> weight, Index out_rows) {
  detail::check(static_cast<Index>(idx.size()) == x.rows() && weight.size() == idx.size(),
                "scatter_rows: index/weight size mismatch");
  Matrix<T> y = Matrix<T>::Zero(out_rows, x.cols());
  for (size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0) continue;
    detail::check(idx[i] < out_rows, "scatter_rows: index out of range");
    y.row(idx[i]) += weight[i] * x.value().row(static_cast<Index>(i));
  }
  return make_op<T>(std::move(y), {x}, [idx = std::move(idx), weight = std::move(weight)](Node<T>& out) {
    const auto& xv = out.parents[0]->value;
    Matrix<T> g = Matrix<T>::Zero(xv.rows(), xv.cols());
    for (size_t i = 0; i < idx.size(); ++i)
      if (idx[i] >= 0) g.row(static_cast<Index>(i)) = weight[i] * out.grad.row(idx[i]);
    push_grad(out, 0, g);
  });
}

/// Sum of all entries, as a 1x1 value.
template <typename T>
Var<T> sum_all(const Var<T>& x) {
  Matrix<T> y(1, 1);
  y(0, 0) = x.value().sum();
  return make_op<T>(std::move(y), {x}, [](Node<T>& out) {
    const auto& xv = out.parents[0]->value;
    push_grad(out, 0, Matrix<T>::Constant(xv.rows(), xv.cols(), out.grad(0, 0)).eval());
  });
}

/// Slices `frames` of length `win` every `hop` samples out of a (T x 1)
/// signal: output (L x win), L = floor((T - win) / hop) + 1.
template <typename T>
Var<T> frame_signal(const Var<T>& x, Index win, Index hop) {
  detail::check(x.cols() == 1, "frame_signal: expects a (T x 1) signal");
  detail::check(win >= 1 && hop >= 1, "frame_signal: bad window/hop");
  const Index t = x.rows();
  detail::check(t >= win, "frame_signal: signal shorter than window (" + std::to_string(win) +
                              " samples minimum, got " + std::to_string(t) + ")");
  const Index l = (t - win) / hop + 1;
  Matrix<T> y(l, win);
  for (Index f = 0; f < l; ++f) y.row(f) = x.value().col(0).segment(f * hop, win).transpose();
  return make_op<T>(std::move(y), {x}, [win, hop, l](Node<T>& out) {
    const auto& xv = out.parents[0]->value;
    Matrix<T> g = Matrix<T>::Zero(xv.rows(), 1);
    for (Index f = 0; f < l; ++f) g.col(0).segment(f * hop, win) += out.grad.row(f).transpose();
    push_grad(out, 0, g);
  });
}

/// Per-sample count of frames covering each output position.
inline std::vector<Index> overlap_counts(Index frames, Index win, Index hop, Index out_len) {
  std::vector<Index> cnt(static_cast<size_t>(out_len), 0);
  for (Index f = 0; f < frames; ++f)
    for (Index j = 0; j < win; ++j) {
      const Index pos = f * hop + j;
      if (pos < out_len) ++cnt[static_cast<size_t>(pos)];
    }
  return cnt;
}

/// Overlap-add of (L x win) frames at `hop` into an (out_len x 1) signal.
/// With `normalize`, each sample is divided by its covering frame count
/// (uncovered samples stay zero). Samples past out_len are dropped.
template <typename T>
Var<T> overlap_add(const Var<T>& frames, Index hop, Index out_len, bool normalize) {
  const Index l = frames.rows(), win = frames.cols();
  std::vector<Index> cnt = overlap_counts(l, win, hop, out_len);
  Matrix<T> y = Matrix<T>::Zero(out_len, 1);
  for (Index f = 0; f < l; ++f)
    for (Index j = 0; j < win; ++j) {
      const Index pos = f * hop + j;
      if (pos < out_len) y(pos, 0) += frames.value()(f, j);
    }
  if (normalize)
    for (Index i = 0; i < out_len; ++i)
      if (cnt[i] > 0) y(i, 0) /= T(cnt[i]);
  return make_op<T>(std::move(y), {frames},
                    [cnt = std::move(cnt), hop, out_len, normalize](Node<T>& out) {
                      const auto& fv = out.parents[0]->value;
                      Matrix<T> g = Matrix<T>::Zero(fv.rows(), fv.cols());
                      for (Index f = 0; f < fv.rows(); ++f)
                        for (Index j = 0; j < fv.cols(); ++j) {
                          const Index pos = f * hop + j;
                          if (pos >= out_len) continue;
                          T gv = out.grad(pos, 0);
                          if (normalize) gv /= T(cnt[pos]);
                          g(f, j) = gv;
                        }
                      push_grad(out, 0, g);
                    });
}

/// Depthwise 1-D convolution along time with "same" padding: zeros, or the
/// edge frame repeated when `replicate` is set. x is (L x C); w is
/// (C x kernel); kernel must be odd.
template <typename T>
Var<T> depthwise_conv1d(const Var<T>& x, const Var<T>& w, Index dilation = 1, bool replicate = false) {
  const Index l = x.rows(), c = x.cols(), k = w.cols();
  detail::check(w.rows() == c, "depthwise_conv1d: weight rows must equal channels");
  detail::check(k % 2 == 1, "depthwise_conv1d: kernel must be odd");
  const Index half = (k / 2) * dilation;
  Matrix<T> y = Matrix<T>::Zero(l, c);
  const auto& xv = x.value();
  const auto& wv = w.value();
  for (Index t = 0; t < l; ++t)
    for (Index j = 0; j < k; ++j) {
      Index src = t + j * dilation - half;
      if (replicate) src = std::clamp<Index>(src, 0, l - 1);
      if (src < 0 || src >= l) continue;
      y.row(t).array() += xv.row(src).array() * wv.col(j).transpose().array();
    }
  return make_op<T>(std::move(y), {x, w}, [half, dilation, replicate](Node<T>& out) {
    const auto& xv = out.parents[0]->value;
    const auto& wv = out.parents[1]->value;
    const Index l = xv.rows(), k = wv.cols();
    Matrix<T> gx = Matrix<T>::Zero(l, xv.cols());
    Matrix<T> gw = Matrix<T>::Zero(wv.rows(), k);
    for (Index t = 0; t < l; ++t)
      for (Index j = 0; j < k; ++j) {
        Index src = t + j * dilation - half;
        if (replicate) src = std::clamp<Index>(src, 0, l - 1);
        if (src < 0 || src >= l) continue;
        gx.row(src).array() += out.grad.row(t).array() * wv.col(j).transpose().array();
        gw.col(j).array() += (out.grad.row(t).array() * xv.row(src).array()).transpose();
      }
    push_grad(out, 0, gx);
    push_grad(out, 1, gw);
  });
}

/// Mean over rows of the cosine similarity between matching rows of a and b.
/// Norms are floored at eps.
template <typename T>
Var<T> mean_row_cosine(const Var<T>& a, const Var<T>& b, T eps = T(1e-8)) {
  detail::check(a.rows() == b.rows() && a.cols() == b.cols(), "mean_row_cosine: shape mismatch");
  const Index n = a.rows();
  detail::check(n > 0, "mean_row_cosine: empty input");
  const auto& av = a.value();
  const auto& bv = b.value();
  Eigen::Matrix<T, Eigen::Dynamic, 1> na(n), nb(n), dot(n);
  T total = 0;
  for (Index r = 0; r < n; ++r) {
    na(r) = std::max(av.row(r).norm(), eps);
    nb(r) = std::max(bv.row(r).norm(), eps);
    dot(r) = av.row(r).dot(bv.row(r));
    total += dot(r) / (na(r) * nb(r));
  }
  Matrix<T> y(1, 1);
  y(0, 0) = total / T(n);
  return make_op<T>(std::move(y), {a, b}, [na, nb, dot, eps](Node<T>& out) {
    const auto& av = out.parents[0]->value;
    const auto& bv = out.parents[1]->value;
    const Index n = av.rows();
    const T g = out.grad(0, 0) / T(n);
    Matrix<T> ga(av.rows(), av.cols()), gb(bv.rows(), bv.cols());
    for (Index r = 0; r < n; ++r) {
      const T inv = T(1) / (na(r) * nb(r));
      const T cosv = dot(r) * inv;
      // d/da of dot/(|a||b|); the norm floor makes the derivative of |a| zero.
      const bool fa = av.row(r).norm() > eps;
      const bool fb = bv.row(r).norm() > eps;
      ga.row(r) = g * (bv.row(r) * inv - (fa ? cosv / (na(r) * na(r)) : T(0)) * av.row(r));
      gb.row(r) = g * (av.row(r) * inv - (fb ? cosv / (nb(r) * nb(r)) : T(0)) * bv.row(r));
    }
    push_grad(out, 0, ga);
    push_grad(out, 1, gb);
  });
}

}  // namespace seanet

#endif  // SEANET_CORE_OPS_HPP_
