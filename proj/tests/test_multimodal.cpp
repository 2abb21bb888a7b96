// Copyright 2026 The seanet-cpp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <gtest/gtest.h>

#include <cmath>

#include "test_util.hpp"

namespace seanet {
namespace {

using testing::random_matrix;
using V = Var<double>;

void set_linear(Linear<double>& l, double w, double b) {
  l.weight.mutable_value().setConstant(w);
  l.bias.mutable_value().setConstant(b);
}

// softmax(sign * q_i * k_j) applied to values, scalar features.
std::vector<double> scalar_attention(const std::vector<double>& q, const std::vector<double>& k,
                                     const std::vector<double>& v, double sign) {
  std::vector<double> out(q.size());
  for (size_t i = 0; i < q.size(); ++i) {
    double z = 0, acc = 0;
    for (size_t j = 0; j < k.size(); ++j) {
      const double e = std::exp(sign * q[i] * k[j]);
      z += e;
      acc += e * v[j];
    }
    out[i] = acc / z;
  }
  return out;
}

TEST(MmTemporalAttention, TiedBranchesHandCheckAtLengthThree) {
  ParameterStore<double> store(1);
  MmAttentionConfig cfg;
  cfg.share_av_projections = true;
  MmTemporalAttention<double> mm(store, "mm", 1, 1, cfg);
  set_linear(mm.q_speech, 1.0, 0.0);
  set_linear(mm.q_noise, 1.0, 0.0);
  set_linear(mm.k_speech, 2.0, 0.0);
  set_linear(mm.v_speech, 1.0, 0.5);
  EXPECT_EQ(mm.k_noise.weight.node(), mm.k_speech.weight.node());
  Matrix<double> a(3, 1), v(3, 1);
  a << 0.0, 1.0, 2.0;
  v << 1.0, 0.0, -1.0;
  Matrix<double> y = mm.fuse(V(a), V(v)).value();
  const std::vector<double> q = {1, 0, -1}, k = {0, 2, 4}, val = {0.5, 1.5, 2.5};
  auto plus = scalar_attention(q, k, val, 1.0), minus = scalar_attention(q, k, val, -1.0);
  for (Index i = 0; i < 3; ++i) EXPECT_NEAR(y(i, 0), plus[i] + minus[i] + 2 * a(i, 0), 1e-12) << i;
  // The middle query is zero, so both branches average the values uniformly.
  EXPECT_NEAR(y(1, 0), 2 * 1.5 + 2.0, 1e-12);
}

TEST(MmTemporalAttention, ScoresAreRowStochastic) {
  ParameterStore<double> store(2);
  MmTemporalAttention<double> mm(store, "mm", 6, 4, MmAttentionConfig{});
  NoGradGuard g;
  V f(random_matrix(15, 6, 3, 3.0)), v(random_matrix(15, 4, 4, 3.0));
  auto lay = SequenceLayout::whole(15);
  const double sc = 1.0 / std::sqrt(6.0);
  for (double sign : {1.0, -1.0}) {
    auto p = attention_scores<double>(mm.q_speech(v).value(), mm.k_speech(f).value(), lay, sign, sc);
    EXPECT_LE((p[0].rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);
  }
}

TEST(MmTemporalAttention, ConcatCombineProjectsBack) {
  ParameterStore<double> store(5);
  MmTemporalAttention<double> mm(store, "mm", 4, 3, MmAttentionConfig{}, FusionCombine::kConcat);
  EXPECT_TRUE(store.contains("mm.merge.weight"));
  V y = mm.fuse(V(random_matrix(7, 4, 6)), V(random_matrix(7, 3, 7)));
  EXPECT_EQ(y.cols(), 4);
  EXPECT_EQ(y.rows(), 7);
}

TEST(MmTemporalAttention, RejectsLengthMismatchAndUnchunkedPsnlPlacement) {
  ParameterStore<double> store(8);
  MmTemporalAttention<double> mm(store, "mm", 4, 3, MmAttentionConfig{});
  EXPECT_THROW(mm.fuse(V(random_matrix(7, 4, 9)), V(random_matrix(6, 3, 10))), std::invalid_argument);
  MmAttentionConfig bad;
  bad.placement = MmPlacement::kPsnl;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  EXPECT_THROW(MmTemporalAttention<double>(store, "mm2", 4, 3, bad), std::invalid_argument);
  bad.chunked_visual = true;
  EXPECT_NO_THROW(bad.validate());
}

TEST(MmTemporalAttention, GradientMatchesFiniteDifferences) {
  ParameterStore<double> store(11);
  MmTemporalAttention<double> mm(store, "mm", 3, 2, MmAttentionConfig{});
  V a(random_matrix(6, 3, 12), true), v(random_matrix(6, 2, 13), true);
  Matrix<double> probe = random_matrix(6, 3, 14);
  auto f = [&] { return sum_all(mul(mm.fuse(a, v), V(probe))); };
  EXPECT_LE(testing::check_gradient(f, a).max_rel_error, 1e-5);
  EXPECT_LE(testing::check_gradient(f, v).max_rel_error, 1e-5);
  EXPECT_LE(testing::check_gradient(f, mm.q_noise.weight).max_rel_error, 1e-5);
}

NetworkConfig mm_cfg(MultimodalVariant m) {
  NetworkConfig c = NetworkConfig::tiny();
  c.mm_variant = m;
  return c;
}

TEST(MultimodalNetwork, EveryVariantPreservesShapes) {
  for (MultimodalVariant m : {MultimodalVariant::kFusion, MultimodalVariant::kPsnl, MultimodalVariant::kContrastive}) {
    ExtractionNetwork<double> net(mm_cfg(m));
    const Index n = 3000, l = net.frames_for(n);
    auto o = net.forward(V(random_matrix(n, 1, 15, 0.3)), V(random_matrix(l, 16, 16)));
    EXPECT_EQ(o.estimate().rows(), n) << to_string(m);
    for (const auto& c : o.speech_chunks) EXPECT_EQ(c.rows(), o.geom.rows());
    EXPECT_EQ(o.visual_chunks.defined(), m == MultimodalVariant::kContrastive);
  }
}

TEST(MultimodalNetwork, PsnlPlacementAddsOneModulePerBlock) {
  ExtractionNetwork<double> base(NetworkConfig::tiny()), p(mm_cfg(MultimodalVariant::kPsnl));
  int count = 0;
  for (const auto& e : p.parameters().entries())
    if (e.name.find(".mm_att.q_speech.weight") != std::string::npos) ++count;
  EXPECT_EQ(count, NetworkConfig::tiny().num_blocks);
  EXPECT_GT(p.param_report().total, base.param_report().total);
}

TEST(MultimodalNetwork, LoadThenExtend) {
  ExtractionNetwork<double> base(NetworkConfig::tiny());
  for (MultimodalVariant m : {MultimodalVariant::kFusion, MultimodalVariant::kPsnl, MultimodalVariant::kContrastive}) {
    NetworkConfig c = mm_cfg(m);
    c.seed = 99;
    ExtractionNetwork<double> ext(c);
    EXPECT_EQ(ext.load_matching(base.parameters()), base.parameters().entries().size()) << to_string(m);
    for (const auto& e : base.parameters().entries())
      EXPECT_EQ(ext.parameters().at(e.name).value(), e.var.value()) << e.name;
  }
  NetworkConfig other = NetworkConfig::tiny();
  other.feature_dim = 8;
  ExtractionNetwork<double> wrong(other);
  EXPECT_THROW(wrong.load_matching(base.parameters()), std::invalid_argument);
}

TEST(MultimodalNetwork, ContrastiveLossIsWeightedIntoTotal) {
  NetworkConfig c = mm_cfg(MultimodalVariant::kContrastive);
  c.contrastive_weight = 0.25;
  ExtractionNetwork<double> net(c);
  const Index n = 2000, l = net.frames_for(n);
  Matrix<double> s = random_matrix(n, 1, 17, 0.3), nz = random_matrix(n, 1, 18, 0.3);
  auto o = net.forward(V(Matrix<double>(s + nz)), V(random_matrix(l, 16, 19)));
  auto t = net.loss(o, s, nz);
  ASSERT_TRUE(t.contrastive.defined());
  const double base = total_loss(o, s, nz, c.beta).total.item();
  EXPECT_NEAR(t.total.item(), base + 0.25 * t.contrastive.item(), 1e-12);
}

// ---------------------------------------------------------------- contrastive

TEST(ContrastiveLoss, AlignedSpeechOrthogonalNoise) {
  const size_t r1 = 3;
  Matrix<double> v(4, 2), orth(4, 2);
  v << 1, 0, 0, 2, 3, 3, -1, 1;
  orth << 0, 5, -1, 0, 1, -1, 2, 2;
  std::vector<V> s(r1, V(v)), n(r1, V(orth));
  EXPECT_NEAR(contrastive_av_loss(s, n, V(v)).item(), -double(r1), 1e-12);
  EXPECT_NEAR(contrastive_av_loss(s, s, V(v)).item(), 0.0, 1e-12);
}

TEST(ContrastiveLoss, MatchesBruteForceCosine) {
  std::vector<V> s, n;
  for (int i = 0; i < 3; ++i) {
    s.emplace_back(random_matrix(10, 4, 20 + i));
    n.emplace_back(random_matrix(10, 4, 30 + i));
  }
  Matrix<double> v = random_matrix(10, 4, 40);
  double want = 0.0;
  for (int i = 0; i < 3; ++i)
    for (Index t = 0; t < 10; ++t) {
      auto cos = [&](const Matrix<double>& a) {
        return a.row(t).dot(v.row(t)) / (a.row(t).norm() * v.row(t).norm());
      };
      want += (cos(n[i].value()) - cos(s[i].value())) / 10.0;
    }
  EXPECT_NEAR(contrastive_av_loss(s, n, V(v)).item(), want, 1e-9);
  EXPECT_THROW(contrastive_av_loss(s, std::vector<V>(n.begin(), n.end() - 1), V(v)), std::invalid_argument);
}

TEST(ContrastiveLoss, GradientPullsSpeechTowardVisualAndNoiseAway) {
  Matrix<double> v = random_matrix(6, 3, 50);
  V s(random_matrix(6, 3, 51), true), n(random_matrix(6, 3, 52), true);
  backward(contrastive_av_loss<double>({s}, {n}, V(v)));
  const double before = contrastive_av_loss<double>({s}, {n}, V(v)).item();
  auto eval_step = [&](const Matrix<double>& ds, const Matrix<double>& dn) {
    NoGradGuard g;
    return contrastive_av_loss<double>({V(Matrix<double>(s.value() + ds))}, {V(Matrix<double>(n.value() + dn))}, V(v))
        .item();
  };
  const Matrix<double> zero = Matrix<double>::Zero(6, 3);
  EXPECT_LT(eval_step(-1e-3 * s.grad(), zero), before);
  EXPECT_LT(eval_step(zero, -1e-3 * n.grad()), before);
  // Moving speech onto the visual stream lowers the loss, moving noise onto it raises it.
  EXPECT_LT(eval_step(0.1 * v, zero), before);
  EXPECT_GT(eval_step(zero, 0.1 * v), before);
  auto f = [&] { return contrastive_av_loss<double>({s}, {n}, V(v)); };
  EXPECT_LE(testing::check_gradient(f, s).max_rel_error, 1e-6);
}

}  // namespace
}  // namespace seanet
