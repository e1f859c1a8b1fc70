#include <gtest/gtest.h>

#include "oracles.hpp"
#include "shallow/constructive.hpp"
#include "shallow/cost.hpp"
#include "shallow/error.hpp"
#include "shallow/gd_baseline.hpp"

using namespace shallow;

TEST(Gradient, MatchesFiniteDifferences) {
  const auto ds = synthesize(3, 2, {4, 5}, 1.0, 0.1, 2);
  GdConfig cfg;
  cfg.init_scale = 0.5;
  const ShallowParams p = initial_params(3, 2, cfg);
  const LossGradient lg = loss_and_gradient(p, ds);
  const auto sq = [&](const ShallowParams& q) {
    const double c = oracle::cost_l2_loop(q, ds.x0(), ds.y(), ds.class_sizes());
    return c * c;
  };
  EXPECT_NEAR(lg.loss, sq(p), 1e-14);

  auto check = [&](Mat ShallowParams::*field) {
    const Mat fd = oracle::finite_difference(p.*field, [&](const Mat& v) {
      ShallowParams q = p;
      q.*field = v;
      return sq(q);
    });
    EXPECT_LT(max_abs(lg.grad.*field - fd), 1e-7);
  };
  check(&ShallowParams::w1);
  check(&ShallowParams::w2);
  auto check_vec = [&](Vec ShallowParams::*field) {
    const Mat fd = oracle::finite_difference(p.*field, [&](const Mat& v) {
      ShallowParams q = p;
      q.*field = v;
      return sq(q);
    });
    EXPECT_LT(max_abs(lg.grad.*field - fd), 1e-7);
  };
  check_vec(&ShallowParams::b1);
  check_vec(&ShallowParams::b2);
}

TEST(TrainGd, ZeroNoiseReachesSmallCost) {
  const auto ds = synthesize(3, 2, {10, 10}, 1.0, 0.0, 1);
  const GdResult r = train_gd(ds, GdConfig{});
  EXPECT_LT(cost_l2(r.params, ds), 1e-4);
  EXPECT_EQ(r.trace.back().step, 20000);
}

TEST(TrainGd, ZeroLearningRate) {
  const auto ds = synthesize(3, 2, {5, 5}, 1.0, 0.1, 1);
  GdConfig cfg;
  cfg.learning_rate = 0;
  cfg.steps = 300;
  const GdResult r = train_gd(ds, cfg);
  const ShallowParams init = initial_params(3, 2, cfg);
  EXPECT_EQ(r.params.w1, init.w1);
  EXPECT_EQ(r.params.b2, init.b2);
  for (const auto& t : r.trace) EXPECT_EQ(t.cost_l2, r.trace.front().cost_l2);
}

TEST(TrainGd, Deterministic) {
  const auto ds = synthesize(3, 2, {5, 5}, 1.0, 0.1, 1);
  GdConfig cfg;
  cfg.steps = 500;
  const GdResult a = train_gd(ds, cfg), b = train_gd(ds, cfg);
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) EXPECT_EQ(a.trace[i].cost_l2, b.trace[i].cost_l2);
  cfg.seed = 1;
  EXPECT_NE(train_gd(ds, cfg).trace.back().cost_l2, a.trace.back().cost_l2);
}

TEST(TrainGd, Diverges) {
  const auto ds = synthesize(3, 2, {5, 5}, 5.0, 0.1, 1);
  GdConfig cfg;
  cfg.learning_rate = 10;
  cfg.steps = 1000;
  try {
    train_gd(ds, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Diverged);
  }
}

TEST(TrainGd, ConfigValidation) {
  GdConfig cfg;
  cfg.steps = -1;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(Compare, Report) {
  const auto ds = synthesize(2, 2, {8, 8}, 1.0, 0.05, 3);
  const auto prep = prepare(ds);
  const auto net = train(ds, prep, {std::nullopt, Variant::ExactQeqQ});
  GdConfig cfg;
  cfg.steps = 200;
  const CompareReport r = compare(ds, train_gd(ds, cfg).params, net.params);
  ASSERT_TRUE(r.exact_min_weighted);
  EXPECT_NEAR(r.constructive.cost_weighted, *r.exact_min_weighted, 1e-12);
  EXPECT_TRUE(r.gd_in_fixed_point_region.has_value());
  const CompareReport wide =
      compare(synthesize(3, 2, {5, 5}, 1.0, 0.05, 3), initial_params(3, 2, cfg), initial_params(3, 2, cfg));
  EXPECT_FALSE(wide.exact_min_weighted);
}
