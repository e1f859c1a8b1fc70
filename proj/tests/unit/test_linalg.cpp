#include <gtest/gtest.h>

#include "oracles.hpp"
#include "shallow/error.hpp"
#include "shallow/linalg.hpp"
#include "shallow/rng.hpp"

using namespace shallow;

TEST(PenroseInverse, RankOneColumn) {
  Mat a(2, 1);
  a << 2, 0;
  Mat expected(1, 2);
  expected << 0.5, 0;
  EXPECT_LT(max_abs(penrose_inverse(a) - expected), 1e-15);
}

TEST(PenroseInverse, Identity) {
  EXPECT_LT(max_abs(penrose_inverse(Mat::Identity(3, 3)) - Mat::Identity(3, 3)), 1e-15);
}

TEST(PenroseInverse, TallEmbedding) {
  Mat a(3, 2);
  a << 1, 0, 0, 1, 0, 0;
  // Normal equations for this a: aᵀa = 1, so Pen = aᵀ.
  const Mat expected = oracle::pinv_normal(a);
  EXPECT_LT(max_abs(penrose_inverse(a) - expected), 1e-15);
  EXPECT_LT(max_abs(expected - a.transpose()), 1e-15);
}

TEST(PenroseInverse, MatchesNormalEquationsOnRandomInput) {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Mat a = gaussian_matrix(6, 3, 1.0, rng);
    const Mat pen = penrose_inverse(a);
    EXPECT_LT(max_abs(pen - oracle::pinv_normal(a)), 1e-10);
    EXPECT_LT(max_abs(pen * a - Mat::Identity(3, 3)), 1e-10);
  }
}

TEST(PenroseInverse, RejectsRankDeficient) {
  Mat a(3, 2);
  a << 1, 2, 2, 4, 3, 6;
  try {
    penrose_inverse(a);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RankDeficient);
  }
}

TEST(PenroseInverse, RejectsWideInput) {
  EXPECT_THROW(penrose_inverse(Mat::Ones(2, 3)), Error);
}

TEST(Orthoprojector, AxisAligned) {
  Mat a(2, 1);
  a << 1, 0;
  const Projectors pr = orthoprojector(a);
  Mat expected(2, 2);
  expected << 1, 0, 0, 0;
  EXPECT_LT(max_abs(pr.p - expected), 1e-15);
  EXPECT_LT(max_abs(pr.p + pr.p_perp - Mat::Identity(2, 2)), 1e-15);
}

TEST(Orthoprojector, Identity) {
  const Projectors pr = orthoprojector(Mat::Identity(4, 4));
  EXPECT_LT(max_abs(pr.p - Mat::Identity(4, 4)), 1e-15);
  EXPECT_LT(max_abs(pr.p_perp), 1e-15);
}

TEST(Orthoprojector, Diagonal) {
  Mat a(2, 1);
  a << 1, 1;
  EXPECT_LT(max_abs(orthoprojector(a).p - oracle::projector_normal(a)), 1e-15);
  EXPECT_LT(max_abs(orthoprojector(a).p - Mat::Constant(2, 2, 0.5)), 1e-15);
}

TEST(Orthoprojector, IdempotentAndSymmetric) {
  Rng rng(3);
  const Mat a = gaussian_matrix(7, 4, 2.0, rng);
  const Mat p = orthoprojector(a).p;
  EXPECT_LT(max_abs(p * p - p), 1e-12);
  EXPECT_LT(max_abs(p - p.transpose()), 1e-15);
  EXPECT_LT(max_abs(p - oracle::projector_normal(a)), 1e-10);
}

TEST(DiagonalizingRotation, AlreadyDiagonal) {
  Mat p(2, 2);
  p << 1, 0, 0, 0;
  EXPECT_LT(max_abs(diagonalizing_rotation(p, 1) - Mat::Identity(2, 2)), 1e-15);
}

TEST(DiagonalizingRotation, DiagonalLine) {
  const Mat p = Mat::Constant(2, 2, 0.5);
  const Mat r = diagonalizing_rotation(p, 1);
  const double s = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(r(0, 0)), s, 1e-15);
  EXPECT_NEAR(std::abs(r(0, 1)), s, 1e-15);
  EXPECT_LT(max_abs(r.transpose() * r - Mat::Identity(2, 2)), 1e-15);
  Mat d(2, 2);
  d << 1, 0, 0, 0;
  EXPECT_LT(max_abs(r * p * r.transpose() - d), 1e-15);
}

TEST(DiagonalizingRotation, Identity) {
  EXPECT_LT(max_abs(diagonalizing_rotation(Mat::Identity(3, 3), 3) - Mat::Identity(3, 3)), 1e-15);
}

TEST(DiagonalizingRotation, DeterministicAndDiagonal) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Mat a = gaussian_matrix(8, 1 + trial % 7, 1.0, rng);
    const Mat p = orthoprojector(a).p;
    const int k = static_cast<int>(a.cols());
    const Mat r = diagonalizing_rotation(p, k);
    EXPECT_EQ(r, diagonalizing_rotation(p, k));
    Mat d = Mat::Zero(8, 8);
    d.topLeftCorner(k, k).setIdentity();
    EXPECT_LT(max_abs(r * p * r.transpose() - d), 1e-10);
    EXPECT_LT(max_abs(r * r.transpose() - Mat::Identity(8, 8)), 1e-12);
  }
}

TEST(DiagonalizingRotation, RejectsNonProjector) {
  Mat p(2, 2);
  p << 1, 1, 0, 0;
  try {
    diagonalizing_rotation(p, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotAProjector);
  }
  EXPECT_THROW(diagonalizing_rotation(Mat::Identity(2, 2), 1), Error);
}

TEST(NumericalRank, Examples) {
  EXPECT_EQ(numerical_rank(Mat::Identity(4, 4)), 4);
  EXPECT_EQ(numerical_rank(Mat::Zero(3, 2)), 0);
  EXPECT_EQ(numerical_rank(Mat::Ones(2, 2)), 1);
}

TEST(NumericalRank, MarginalFlag) {
  Mat a = Mat::Identity(2, 2);
  a(1, 1) = 1.5e-10;
  const RankInfo info = rank_info(a);
  EXPECT_EQ(info.rank, 2);
  EXPECT_TRUE(info.marginal);
  EXPECT_FALSE(rank_info(Mat::Identity(2, 2)).marginal);
}

TEST(ProjectorPack, Consistent) {
  Rng rng(5);
  const Mat means = gaussian_matrix(5, 3, 1.0, rng);
  const ProjectorPack pack = make_projector_pack(means);
  EXPECT_EQ(pack.rank, 3);
  EXPECT_LT(max_abs(pack.pen * means - Mat::Identity(3, 3)), 1e-12);
  const Vec ind = pack.range_indicator();
  EXPECT_EQ(ind.sum(), 3.0);
  EXPECT_LT(max_abs(pack.r * pack.p * pack.r.transpose() - Mat(ind.asDiagonal())), 1e-10);
}
