// Copyright 2026 The seanet-cpp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Audio encoder, visual encoder and the oracle visual cue.
//
// The audio encoder is a learnable, bias-free 1-D convolution (window `win`,
// stride `hop`) followed by ReLU; it yields L = floor((T - win) / hop) + 1
// frames of width D_a. The visual encoder runs a frozen per-frame
// convolutional front-end, a stack of residual temporal blocks
// (ReLU -> batch-norm affine -> depthwise-separable conv) and up-samples the
// result to L audio frames.

#ifndef SEANET_NN_ENCODERS_HPP_
#define SEANET_NN_ENCODERS_HPP_

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "seanet/nn/config.hpp"
#include "seanet/nn/layers.hpp"
#include "seanet/signal/audio.hpp"
#include "seanet/signal/spectral.hpp"

namespace seanet {

inline Index encoder_frames(Index num_samples, Index win, Index hop) {
  if (num_samples < win) return 0;
  return (num_samples - win) / hop + 1;
}

template <typename T>
Var<T> waveform_var(const Waveform& w, bool requires_grad = false) {
  Matrix<T> m(static_cast<Index>(w.size()), 1);
  for (size_t i = 0; i < w.size(); ++i) m(static_cast<Index>(i), 0) = static_cast<T>(w.samples[i]);
  return Var<T>(std::move(m), requires_grad);
}

template <typename T>
Waveform to_waveform(const Matrix<T>& m, int sample_rate = kDefaultSampleRate) {
  Waveform w;
  w.sample_rate = sample_rate;
  w.samples.resize(static_cast<size_t>(m.size()));
  for (Index i = 0; i < m.size(); ++i) w.samples[static_cast<size_t>(i)] = static_cast<double>(m.data()[i]);
  return w;
}

template <typename T>
struct AudioEncoder {
  Var<T> weight;  // (D_a x win)
  Index win = 32, hop = 16;

  AudioEncoder() = default;
  AudioEncoder(ParameterStore<T>& store, const std::string& name, Index dim, Index window, Index stride)
      : win(window), hop(stride) {
    weight = store.create(name + ".weight", dim, window, Init::kXavier);
  }

  /// (T x 1) waveform -> nonnegative (L x D_a) embedding.
  Var<T> operator()(const Var<T>& x) const {
    if (x.rows() < win)
      throw std::invalid_argument("audio encoder: input has " + std::to_string(x.rows()) +
                                  " samples, minimum is " + std::to_string(win));
    return relu(linear(frame_signal(x, win, hop), weight));
  }
};

/// Up-sampling matrix mapping F visual frames onto L audio frames.
/// Nearest mode picks frame floor(l F / L).
template <typename T>
Matrix<T> upsample_matrix(Index frames, Index target, UpsampleMode mode) {
  Matrix<T> u = Matrix<T>::Zero(target, frames);
  for (Index l = 0; l < target; ++l) {
    if (mode == UpsampleMode::kNearest || frames == 1) {
      u(l, std::min(frames - 1, (l * frames) / target)) = T(1);
    } else {
      const double pos = std::clamp((l + 0.5) * frames / target - 0.5, 0.0, double(frames - 1));
      const Index i0 = static_cast<Index>(std::floor(pos));
      const Index i1 = std::min(frames - 1, i0 + 1);
      const T w = static_cast<T>(pos - i0);
      u(l, i0) += T(1) - w;
      u(l, i1) += w;
    }
  }
  return u;
}

template <typename T>
Var<T> upsample(const Var<T>& x, Index target, UpsampleMode mode) {
  return matmul(Var<T>(upsample_matrix<T>(x.rows(), target, mode)), x);
}

template <typename T>
struct TemporalBlock {
  Var<T> bn_scale, bn_shift;
  Var<T> depthwise;  // (C x 3)
  Linear<T> pointwise;

  TemporalBlock() = default;
  TemporalBlock(ParameterStore<T>& store, const std::string& name, Index channels) {
    bn_scale = store.create(name + ".bn.scale", 1, channels, Init::kOnes);
    bn_shift = store.create(name + ".bn.shift", 1, channels, Init::kZeros);
    depthwise = store.create(name + ".depthwise", channels, 3, Init::kXavier);
    pointwise = Linear<T>(store, name + ".pointwise", channels, channels);
  }

  Var<T> operator()(const Var<T>& x) const {
    Var<T> h = add_row(mul_row(relu(x), bn_scale), bn_shift);
    return add(x, pointwise(depthwise_conv1d(h, depthwise, 1, true)));
  }
};

/// Frozen per-frame convolutional front-end for 2-D gray frames.
template <typename T>
struct LipFrontEnd {
  Var<T> conv1, conv2;  // (C1 x 25), (C2 x C1*9)
  Linear<T> proj;       // C2 -> D_v, frozen
  Index c1 = 8, c2 = 32;

  LipFrontEnd() = default;
  LipFrontEnd(ParameterStore<T>& store, const std::string& name, Index channels, Index out_dim)
      : c1(std::max<Index>(1, channels / 4)), c2(channels) {
    conv1 = store.create(name + ".conv1", c1, 25, Init::kXavier, T(0), false);
    conv2 = store.create(name + ".conv2", c2, c1 * 9, Init::kXavier, T(0), false);
    proj.weight = store.create(name + ".proj.weight", out_dim, c2, Init::kXavier, T(0), false);
  }

  /// One row per frame.
  Matrix<T> operator()(const VisualStream& v) const {
    Matrix<T> out(static_cast<Index>(v.size()), proj.weight.rows());
    for (size_t f = 0; f < v.size(); ++f) out.row(static_cast<Index>(f)) = frame_features(v.frames[f], v.width, v.height);
    return out;
  }

 private:
  // Valid 2-D convolution, single input plane of size (h x w) per channel.
  static std::vector<Matrix<T>> conv(const std::vector<Matrix<T>>& in, const Matrix<T>& w, int k, int stride) {
    const Index h = in[0].rows(), wd = in[0].cols();
    const Index oh = (h - k) / stride + 1, ow = (wd - k) / stride + 1;
    const Index cin = static_cast<Index>(in.size());
    std::vector<Matrix<T>> out(static_cast<size_t>(w.rows()), Matrix<T>::Zero(oh, ow));
    for (Index co = 0; co < w.rows(); ++co)
      for (Index y = 0; y < oh; ++y)
        for (Index x = 0; x < ow; ++x) {
          T acc = 0;
          for (Index ci = 0; ci < cin; ++ci)
            for (int dy = 0; dy < k; ++dy)
              for (int dx = 0; dx < k; ++dx)
                acc += w(co, ci * k * k + dy * k + dx) * in[ci](y * stride + dy, x * stride + dx);
          out[co](y, x) = std::max(acc, T(0));
        }
    return out;
  }

  RowVector<T> frame_features(const std::vector<float>& px, int width, int height) const {
    if (height < 11 || width < 11) throw std::invalid_argument("lip front-end: frame smaller than 11x11");
    Matrix<T> img(height, width);
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) img(y, x) = static_cast<T>(px[static_cast<size_t>(y * width + x)]);
    auto h1 = conv({img}, conv1.value(), 5, 4);
    auto h2 = conv(h1, conv2.value(), 3, 2);
    RowVector<T> pooled(c2);
    for (Index c = 0; c < c2; ++c) pooled(c) = h2[static_cast<size_t>(c)].mean();
    return pooled * proj.weight.value().transpose();
  }
};

/// Visual encoder. Frames with height 1 are taken as precomputed per-frame
/// features of width D_v and skip the front-end.
template <typename T>
struct VisualEncoder {
  LipFrontEnd<T> frontend;
  std::vector<TemporalBlock<T>> blocks;
  UpsampleMode mode = UpsampleMode::kNearest;
  Index dim = 0;

  VisualEncoder() = default;
  VisualEncoder(ParameterStore<T>& store, const std::string& name, const NetworkConfig& cfg)
      : frontend(store, name + ".frontend", cfg.frontend_channels, cfg.visual_dim),
        mode(cfg.upsample),
        dim(cfg.visual_dim) {
    for (int b = 0; b < cfg.vtcn_blocks; ++b)
      blocks.emplace_back(store, name + ".vtcn." + std::to_string(b), cfg.visual_dim);
  }

  /// Per-frame features before the temporal stack.
  Matrix<T> frame_features(const VisualStream& v) const {
    if (v.height == 1) {
      Matrix<T> m(static_cast<Index>(v.size()), dim);
      for (size_t f = 0; f < v.size(); ++f) {
        if (static_cast<Index>(v.frames[f].size()) != dim)
          throw std::invalid_argument("visual encoder: feature frame width != visual_dim");
        for (Index c = 0; c < dim; ++c) m(static_cast<Index>(f), c) = static_cast<T>(v.frames[f][c]);
      }
      return m;
    }
    return frontend(v);
  }

  /// Temporal stack output at the video frame rate, (F x D_v).
  Var<T> temporal(const VisualStream& v) const {
    Var<T> h(frame_features(v));
    for (const auto& b : blocks) h = b(h);
    return h;
  }

  /// (L x D_v) embedding aligned with the audio frames of a signal of
  /// `num_samples` samples at `sample_rate`.
  Var<T> operator()(const VisualStream& v, Index num_frames, Index num_samples, int sample_rate) const {
    if (!(v.frame_rate > 0.0)) throw std::invalid_argument("visual encoder: frame rate must be positive");
    if (v.size() == 0) throw std::invalid_argument("visual encoder: no frames");
    const double expected = static_cast<double>(num_samples) / sample_rate * v.frame_rate;
    if (std::abs(static_cast<double>(v.size()) - expected) > 0.1 * expected + 1.0)
      throw std::invalid_argument("visual encoder: " + std::to_string(v.size()) + " frames for audio of " +
                                  std::to_string(expected) + " expected frames (>10% mismatch)");
    return upsample(temporal(v), num_frames, mode);
  }
};

/// Envelope frame geometry of the oracle cue (10 ms hop, 25 ms window).
struct OracleOptions {
  int bands = 16;
  int env_win = 400;
  int env_hop = 160;
  uint64_t projection_seed = 0x0AC1E5EEDULL;
};

/// Desk-scale stand-in for a synchronized lip embedding: the clean target's
/// per-band log envelope (normalized per band over time), projected to D_v
/// by a fixed random matrix and mapped onto L audio frames of the encoder
/// (win, hop) grid. Depends only on the target signal.
inline Matrix<double> oracle_visual_embed(const Waveform& s, Index num_frames, Index dim, Index win, Index hop,
                                          const OracleOptions& o = {}) {
  StftOptions so;
  so.win = o.env_win;
  so.hop = o.env_hop;
  so.fft_size = 512;
  Matrix<double> p = power_spectrogram(s, so);
  Matrix<double> fb = mel_filterbank(o.bands, so.fft_size, s.sample_rate, 80.0, 0.45 * s.sample_rate);
  Matrix<double> env = ((p * fb.transpose()).array() + 1e-6).log().matrix();
  for (Index b = 0; b < env.cols(); ++b) {
    auto c = env.col(b);
    const double mean = c.mean();
    const double sd = std::sqrt((c.array() - mean).square().mean());
    c = (c.array() - mean) / (sd + 1e-3);
  }
  std::mt19937_64 rng(o.projection_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix<double> proj(o.bands, dim);
  for (Index i = 0; i < proj.size(); ++i) proj.data()[i] = gauss(rng) / std::sqrt(double(o.bands));
  Matrix<double> feat = env * proj;
  Matrix<double> out(num_frames, dim);
  const Index n_env = feat.rows();
  for (Index l = 0; l < num_frames; ++l) {
    const double center = static_cast<double>(l * hop) + 0.5 * static_cast<double>(win);
    const double e = std::round((center - 0.5 * o.env_win) / o.env_hop);
    const Index idx = static_cast<Index>(std::clamp(e, 0.0, double(n_env - 1)));
    out.row(l) = feat.row(idx);
  }
  return out;
}

/// Renders synthetic 112x112 mouth frames whose opening follows the
/// target's short-time energy, at `fps`.
inline VisualStream render_lip_frames(const Waveform& s, double fps = kDefaultFrameRate, int size = 112) {
  VisualStream v;
  v.width = v.height = size;
  v.frame_rate = fps;
  const size_t count = static_cast<size_t>(std::llround(s.duration() * fps));
  const double per = s.sample_rate / fps;
  double peak = 1e-12;
  std::vector<double> rms(count, 0.0);
  for (size_t f = 0; f < count; ++f) {
    const size_t a = static_cast<size_t>(f * per), b = std::min(s.size(), static_cast<size_t>((f + 1) * per));
    double e = 0.0;
    for (size_t i = a; i < b; ++i) e += s.samples[i] * s.samples[i];
    rms[f] = std::sqrt(e / std::max<size_t>(1, b - a));
    peak = std::max(peak, rms[f]);
  }
  for (size_t f = 0; f < count; ++f) {
    std::vector<float> img(static_cast<size_t>(size * size), 0.8f);
    const double open = 2.0 + 20.0 * rms[f] / peak;
    const double cx = size / 2.0, cy = size * 0.65, rx = size * 0.22;
    for (int y = 0; y < size; ++y)
      for (int x = 0; x < size; ++x) {
        const double dx = (x - cx) / rx, dy = (y - cy) / open;
        if (dx * dx + dy * dy <= 1.0) img[static_cast<size_t>(y * size + x)] = 0.1f;
      }
    v.frames.push_back(std::move(img));
  }
  return v;
}

}  // namespace seanet

#endif  // SEANET_NN_ENCODERS_HPP_
