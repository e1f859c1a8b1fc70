#include <gtest/gtest.h>

#include "oracles.hpp"
#include "shallow/cost.hpp"
#include "shallow/error.hpp"
#include "shallow/rng.hpp"
#include "shallow/truncation.hpp"

using namespace shallow;

namespace {

int lu_rank(const Mat& a) {
  Eigen::FullPivLU<Mat> lu(a);
  lu.setThreshold(1e-10);
  return static_cast<int>(lu.rank());
}

}  // namespace

TEST(Truncate, IdentityOnRegion) {
  const auto ds = oracle::delta_point_one();
  const Vec b1 = Vec::Constant(2, 2.2);
  EXPECT_LT(max_abs(truncate(Mat::Identity(2, 2), b1, ds) - ds.x0()), 1e-15);
}

TEST(Truncate, FullTruncation) {
  const auto ds = oracle::delta_point_one().with_inputs(-oracle::delta_point_one().x0());
  EXPECT_EQ(truncate(Mat::Identity(2, 2), Vec::Zero(2), ds), Mat::Zero(2, 4));
  const TruncationResult r = min_over_output_layer(Mat::Identity(2, 2), Vec::Zero(2), ds);
  EXPECT_FALSE(r.rank_x0_preserved);
  EXPECT_FALSE(r.rank_means_preserved);
  EXPECT_FALSE(r.min_cost_weighted);
}

TEST(Truncate, PartialClipping) {
  const auto ds = oracle::delta_point_one();
  Vec b1(2);
  b1 << -0.5, 0;
  const Mat tau = truncate(Mat::Identity(2, 2), b1, ds);
  Mat expected(2, 4);
  expected << 1.1, 0.9, 0.5, 0.5,  //
      0, 0, 1.1, 0.9;
  EXPECT_LT(max_abs(tau - expected), 1e-15);
  EXPECT_LT(max_abs(tau - oracle::truncate_loop(Mat::Identity(2, 2), b1, ds.x0())), 1e-15);

  const auto flags = is_rank_preserving(tau, ds);
  EXPECT_EQ(flags.inputs, lu_rank(tau) == lu_rank(ds.x0()));
  EXPECT_EQ(flags.means, lu_rank(oracle::class_means_loop(tau, {2, 2})) == 2);
  EXPECT_TRUE(flags.inputs && flags.means);
}

TEST(Truncate, ReapplicationIdentity) {
  const auto ds = synthesize(3, 3, {5, 6, 7}, 1.0, 0.1, 4);
  Rng rng(2);
  for (int i = 0; i < 10; ++i) {
    const Mat w1 = random_invertible(3, 10, rng);
    const Vec b1 = gaussian_matrix(3, 1, 0.5, rng);
    const Mat tau = truncate(w1, b1, ds);
    EXPECT_LT(max_abs(tau - oracle::truncate_loop(w1, b1, ds.x0())), 1e-10);
    const Mat pre = (w1 * tau).colwise() + b1;
    EXPECT_LT(max_abs(relu(pre) - pre), 1e-10);
  }
}

TEST(Truncate, Errors) {
  const auto ds = oracle::delta_point_one();
  try {
    truncate(Mat::Zero(2, 2), Vec::Zero(2), ds);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularW1);
  }
  const auto wide = synthesize(3, 2, {3, 3}, 1.0, 0.1, 1);
  EXPECT_THROW(truncate(Mat::Identity(3, 3), Vec::Zero(3), wide), Error);
}

TEST(RankPreservation, Identity) {
  const auto ds = oracle::delta_point_one();
  const auto flags = is_rank_preserving(ds.x0(), ds);
  EXPECT_TRUE(flags.inputs);
  EXPECT_TRUE(flags.means);
}

TEST(MinOverOutputLayer, RegionGivesExactMinimum) {
  const auto ds = oracle::delta_point_one();
  const TruncationResult r = min_over_output_layer(Mat::Identity(2, 2), Vec::Constant(2, 3.0), ds);
  EXPECT_TRUE(r.in_fixed_point_region);
  ASSERT_TRUE(r.min_cost_weighted);
  EXPECT_NEAR(*r.min_cost_weighted, exact_min_weighted(ds, prepare(ds).stats), 1e-14);
}

TEST(MinOverOutputLayer, PartialClippingMatchesTiedLeastSquares) {
  const auto ds = oracle::delta_point_one();
  Vec b1(2);
  b1 << -0.5, 0;
  const TruncationResult r = min_over_output_layer(Mat::Identity(2, 2), b1, ds);
  EXPECT_FALSE(r.in_fixed_point_region);
  ASSERT_TRUE(r.min_cost_weighted && r.tied_lsq_min && r.affine_lsq_min);
  const Mat hidden = relu(ds.x0().colwise() + b1);
  const double tied = oracle::brute_force_tied(hidden, b1, ds.y(), {2, 2});
  EXPECT_LT(oracle::rel(*r.min_cost_weighted, tied), 1e-10);
  EXPECT_LT(oracle::rel(*r.projector_residual_tr, tied), 1e-10);
  EXPECT_LT(oracle::rel(*r.affine_lsq_min, oracle::brute_force_affine(hidden, ds.y(), {2, 2})), 1e-10);
}

TEST(Sweep, RegionGridHasIdenticalMinima) {
  const auto ds = synthesize(3, 3, {6, 6, 6}, 1.0, 0.1, 3);
  const double rho = prepare(ds).stats.rho;
  std::vector<FirstLayer> grid;
  for (int k = 0; k <= 10; ++k) grid.push_back({Mat::Identity(3, 3), Vec::Constant(3, (2 + 0.2 * k) * rho)});
  const auto results = sweep_fixed_point_region(ds, grid);
  ASSERT_EQ(results.size(), grid.size());
  for (const auto& r : results) {
    EXPECT_TRUE(r.in_fixed_point_region);
    EXPECT_LT(oracle::rel(*r.min_cost_weighted, *results[0].min_cost_weighted), 1e-8);
  }
}

TEST(Sweep, CrossingThreshold) {
  const auto ds = synthesize(3, 3, {6, 6, 6}, 1.0, 0.1, 3);
  const double rho = prepare(ds).stats.rho;
  std::vector<FirstLayer> grid;
  for (int k = 0; k <= 8; ++k) grid.push_back({Mat::Identity(3, 3), Vec::Constant(3, (0.25 * k - 0.5) * rho)});
  const auto results = sweep_fixed_point_region(ds, grid);
  EXPECT_FALSE(results.front().in_fixed_point_region);
  EXPECT_TRUE(results.back().in_fixed_point_region);
  double lo = 1e300, hi = -1e300;
  for (const auto& r : results) {
    if (r.in_fixed_point_region || !r.min_cost_weighted) continue;
    lo = std::min(lo, *r.min_cost_weighted);
    hi = std::max(hi, *r.min_cost_weighted);
  }
  EXPECT_GT(hi - lo, 1e-6);
}

TEST(Sweep, RecordsPerPointErrors) {
  const auto ds = oracle::delta_point_one();
  const std::vector<FirstLayer> grid{{Mat::Identity(2, 2), Vec::Constant(2, 3.0)}, {Mat::Zero(2, 2), Vec::Zero(2)}};
  const auto results = sweep_fixed_point_region(ds, grid);
  EXPECT_FALSE(results[0].error);
  EXPECT_TRUE(results[1].error);
}
