// Copyright 2026 The seanet-cpp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_util.hpp"

namespace seanet {
namespace {

using testing::random_matrix;
using V = Var<double>;

TEST(ChunkGeometry, CountsAndPadding) {
  auto g = ChunkGeometry::make(250, 100);
  EXPECT_EQ(g.count, 4);
  EXPECT_EQ(g.pad, 0);
  g = ChunkGeometry::make(100, 100);
  EXPECT_EQ(g.count, 1);
  EXPECT_EQ(g.pad, 0);
  g = ChunkGeometry::make(30, 100);
  EXPECT_EQ(g.count, 1);
  EXPECT_EQ(g.pad, 70);
  g = ChunkGeometry::make(1999, 100);
  EXPECT_EQ(g.count, 39);
  EXPECT_EQ(g.pad, 38 * 50 + 100 - 1999);
  g = ChunkGeometry::make(101, 100);
  EXPECT_EQ(g.count, 2);
  EXPECT_EQ(g.pad, 49);
}

TEST(ChunkGeometry, RejectsBadChunk) {
  EXPECT_THROW(ChunkGeometry::make(10, 3), std::invalid_argument);
  EXPECT_THROW(ChunkGeometry::make(10, 0), std::invalid_argument);
  EXPECT_THROW(ChunkGeometry::make(0, 4), std::invalid_argument);
}

// Property: the padded sequence is exactly covered, P is minimal, and
// padding is shorter than one hop unless L < K.
TEST(ChunkGeometry, PaddingIsMinimal) {
  for (Index k = 2; k <= 40; k += 2)
    for (Index l = 1; l <= 200; ++l) {
      auto g = ChunkGeometry::make(l, k);
      EXPECT_EQ((g.count - 1) * (k / 2) + k, l + g.pad);
      EXPECT_GE(g.pad, 0);
      if (l >= k) {
        EXPECT_LT(g.pad, k / 2);
      } else {
        EXPECT_EQ(g.count, 1);
      }
    }
}

TEST(Segment, IndexBookkeeping) {
  Matrix<double> e(7, 1);
  for (Index i = 0; i < 7; ++i) e(i, 0) = 100.0 + i;
  auto c = segment(V(e), 4);
  ASSERT_EQ(c.geom.count, 3);
  ASSERT_EQ(c.data.rows(), 12);
  for (Index p = 0; p < 3; ++p)
    for (Index k = 0; k < 4; ++k) {
      const Index f = p * 2 + k;
      EXPECT_EQ(c.data.value()(p * 4 + k, 0), f < 7 ? 100.0 + f : 0.0) << p << "," << k;
    }
  const std::vector<Index> cov = c.geom.coverage();
  EXPECT_EQ(cov, (std::vector<Index>{1, 1, 2, 2, 2, 2, 1}));
}

TEST(Segment, SingleChunkIsIdentity) {
  Matrix<double> e = random_matrix(12, 3, 1);
  auto c = segment(V(e), 12);
  EXPECT_EQ(c.geom.count, 1);
  EXPECT_EQ((c.data.value() - e).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ((aggregate(c).value() - e).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Segment, RoundTripOverRandomShapes) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<Index> kd(1, 30), ld(1, 300);
  double worst = 0.0;
  int short_cases = 0, equal_cases = 0, ragged_cases = 0;
  for (int i = 0; i < 200; ++i) {
    const Index k = 2 * kd(rng);
    Index l = ld(rng);
    if (i % 20 == 0) l = k;
    if (i % 20 == 1) l = std::max<Index>(1, k / 3);
    short_cases += l < k;
    equal_cases += l == k;
    ragged_cases += l % (k / 2) != 0;
    Matrix<double> e = random_matrix(l, 3, 100 + i);
    worst = std::max(worst, (aggregate(segment(V(e), k)).value() - e).cwiseAbs().maxCoeff());
  }
  EXPECT_LE(worst, 1e-12);
  EXPECT_GT(short_cases, 0);
  EXPECT_GT(equal_cases, 0);
  EXPECT_GT(ragged_cases, 0);
}

TEST(Aggregate, ConstantChunksGiveConstantSequence) {
  auto g = ChunkGeometry::make(57, 10);
  Matrix<double> c = Matrix<double>::Constant(g.rows(), 2, 3.25);
  Matrix<double> out = aggregate(V(c), g).value();
  EXPECT_EQ(out.rows(), 57);
  EXPECT_LE((out.array() - 3.25).abs().maxCoeff(), 1e-12);
}

TEST(Aggregate, IsLinear) {
  auto g = ChunkGeometry::make(45, 8);
  Matrix<double> x = random_matrix(g.rows(), 3, 1), y = random_matrix(g.rows(), 3, 2);
  Matrix<double> lhs = aggregate(V((2.0 * x - 0.5 * y).eval()), g).value();
  Matrix<double> rhs = 2.0 * aggregate(V(x), g).value() - 0.5 * aggregate(V(y), g).value();
  EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW(aggregate(V(random_matrix(g.rows() - 1, 3, 3)), g), std::invalid_argument);
}

// Aggregation is the 1/coverage-weighted adjoint of segmentation.
TEST(Aggregate, IsWeightedAdjointOfSegment) {
  auto g = ChunkGeometry::make(33, 6);
  Matrix<double> e = random_matrix(33, 2, 4), c = random_matrix(g.rows(), 2, 5);
  const auto cov = g.coverage();
  Matrix<double> ew = e;
  for (Index f = 0; f < 33; ++f) ew.row(f) /= static_cast<double>(cov[static_cast<size_t>(f)]);
  const double lhs = segment(V(ew), 6).data.value().cwiseProduct(c).sum();
  const double rhs = aggregate(V(c), g).value().cwiseProduct(e).sum();
  EXPECT_NEAR(lhs, rhs, 1e-12);
}

NetworkConfig toy_cfg() {
  NetworkConfig c = NetworkConfig::tiny();
  c.audio_dim = 1;
  c.visual_dim = 1;
  c.feature_dim = 1;
  return c;
}

TEST(Fusion, HandComputedThreeFrames) {
  ParameterStore<double> store(1);
  Fusion<double> fuse(store, "f", toy_cfg());
  fuse.audio_proj.weight.mutable_value()(0, 0) = 2.0;
  fuse.audio_proj.bias.mutable_value()(0, 0) = 0.5;
  fuse.out_proj.weight.mutable_value() << 1.0, 0.1;
  fuse.out_proj.bias.mutable_value()(0, 0) = -1.0;
  Matrix<double> x(3, 1), v(3, 1);
  x << 1, 2, 3;
  v << 10, 20, 30;
  Matrix<double> y = fuse(V(x), V(v)).value();
  // GN: mean 2, variance 2/3, so normalized frames are -sqrt(1.5), 0, sqrt(1.5).
  const double z = std::sqrt(1.5);
  EXPECT_NEAR(y(0, 0), -2 * z + 0.5 + 1.0 - 1.0, 1e-7);
  EXPECT_NEAR(y(1, 0), 0.5 + 2.0 - 1.0, 1e-12);
  EXPECT_NEAR(y(2, 0), 2 * z + 0.5 + 3.0 - 1.0, 1e-7);
}

TEST(Fusion, PreservesLengthAndUsesVisual) {
  NetworkConfig cfg = NetworkConfig::tiny();
  ParameterStore<double> store(2);
  Fusion<double> fuse(store, "f", cfg);
  Matrix<double> x = random_matrix(37, cfg.audio_dim, 3).cwiseAbs(), v = random_matrix(37, cfg.visual_dim, 4);
  Matrix<double> y1 = fuse(V(x), V(v)).value();
  EXPECT_EQ(y1.rows(), 37);
  EXPECT_EQ(y1.cols(), cfg.feature_dim);
  Matrix<double> y2 = fuse(V(x), V((2.0 * v).eval())).value();
  EXPECT_GT((y1 - y2).cwiseAbs().maxCoeff(), 1e-3);
  EXPECT_THROW(fuse(V(x), V(random_matrix(36, cfg.visual_dim, 5))), std::invalid_argument);
}

TEST(Fusion, GradientMatchesFiniteDifferences) {
  NetworkConfig cfg = toy_cfg();
  cfg.audio_dim = 3;
  cfg.visual_dim = 2;
  cfg.feature_dim = 2;
  ParameterStore<double> store(6);
  Fusion<double> fuse(store, "f", cfg);
  V x(random_matrix(5, 3, 7), true), v(random_matrix(5, 2, 8), true);
  Matrix<double> probe = random_matrix(5, 2, 9);
  auto f = [&] { return sum_all(mul(fuse(x, v), V(probe))); };
  EXPECT_LE(testing::check_gradient(f, x).max_rel_error, 1e-5);
  EXPECT_LE(testing::check_gradient(f, v).max_rel_error, 1e-6);
  EXPECT_LE(testing::check_gradient(f, fuse.out_proj.weight).max_rel_error, 1e-6);
}

}  // namespace
}  // namespace seanet
