#include <gtest/gtest.h>

#include "oracles.hpp"
#include "shallow/constructive.hpp"
#include "shallow/error.hpp"
#include "shallow/network.hpp"

using namespace shallow;

TEST(Relu, Examples) {
  Mat a(2, 2);
  a << -1, 2, 0, -3;
  Mat expected(2, 2);
  expected << 0, 2, 0, 0;
  EXPECT_EQ(relu(a), expected);
  const Mat pos = Mat::Random(3, 3).cwiseAbs();
  EXPECT_EQ(relu(pos), pos);
}

TEST(Forward, IdentityOnPositiveRegion) {
  ShallowParams p{Mat::Identity(2, 2), Vec::Constant(2, 5.0), Mat::Identity(2, 2), Vec::Zero(2)};
  Mat x(2, 3);
  x << 1, -2, 0.5, -1, 2, 0;
  const ForwardPass f = forward(p, x);
  EXPECT_EQ(f.x1, x.colwise() + p.b1);
}

TEST(Forward, FullTruncation) {
  ShallowParams p{Mat::Identity(2, 2), Vec::Zero(2), Mat::Identity(2, 2), Vec::Zero(2)};
  const Mat x = -Mat::Random(2, 4).cwiseAbs();
  EXPECT_EQ(forward(p, x).x1, Mat::Zero(2, 4));
}

TEST(Forward, ConstructiveMapsMeansToTargets) {
  const auto ds = oracle::zero_noise_identity();
  const auto prep = prepare(ds);
  const ShallowParams p = train_general(ds, prep.stats, prep.pack, {});
  // W2(R x̄ + b1) + b2 by hand: W2 P_R R x̄ = Y Pen P x̄ = y_j.
  const Mat out = output(p, ds.x0());
  EXPECT_LT(max_abs(out - oracle::y_ext_loop(ds.y(), {2, 2})), 1e-12);
}

TEST(Params, Validate) {
  ShallowParams p{Mat::Identity(2, 2), Vec::Zero(3), Mat::Identity(2, 2), Vec::Zero(2)};
  EXPECT_THROW(p.validate(), Error);
  p.b1 = Vec::Zero(2);
  EXPECT_NO_THROW(p.validate());
  p.w2(0, 0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(p.validate(), Error);
}
