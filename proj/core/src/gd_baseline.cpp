#include "shallow/gd_baseline.hpp"

#include <cmath>
#include <string>

#include "shallow/cost.hpp"
#include "shallow/error.hpp"
#include "shallow/rng.hpp"

namespace shallow {

void GdConfig::validate() const {
  if (learning_rate < 0.0 || steps < 0 || init_scale < 0.0 || record_every <= 0) {
    throw Error(ErrorCode::InvalidInput, "invalid gradient descent configuration");
  }
}

LossGradient loss_and_gradient(const ShallowParams& p, const ClassifiedDataset& ds) {
  const ForwardPass fp = forward(p, ds.x0());
  const double n = static_cast<double>(ds.n());
  const Mat r = fp.x2 - y_ext(ds);
  LossGradient out;
  out.loss = r.squaredNorm() / n;
  const Mat g2 = (2.0 / n) * r;
  out.grad.w2 = g2 * fp.x1.transpose();
  out.grad.b2 = g2.rowwise().sum();
  const Mat g1 = (p.w2.transpose() * g2).cwiseProduct((fp.pre.array() > 0.0).cast<double>().matrix());
  out.grad.w1 = g1 * ds.x0().transpose();
  out.grad.b1 = g1.rowwise().sum();
  return out;
}

ShallowParams initial_params(int m, int q, const GdConfig& cfg) {
  Rng rng(cfg.seed);
  ShallowParams p;
  p.w1 = gaussian_matrix(m, m, cfg.init_scale, rng);
  p.b1 = Vec::Constant(m, cfg.init_scale);
  p.w2 = gaussian_matrix(q, m, cfg.init_scale, rng);
  p.b2 = Vec::Zero(q);
  return p;
}

GdResult train_gd(const ClassifiedDataset& ds, const GdConfig& cfg, const std::optional<ShallowParams>& init) {
  cfg.validate();
  GdResult out;
  out.params = init ? *init : initial_params(ds.m(), ds.q(), cfg);
  out.params.validate();
  if (out.params.m() != ds.m() || out.params.q() != ds.q()) {
    throw Error(ErrorCode::DimensionError, "initial params do not match dataset");
  }
  ShallowParams& p = out.params;
  const double initial = std::sqrt(loss_and_gradient(p, ds).loss);
  const double limit = 1e6 * std::max(initial, 1e-300);

  for (int step = 0; step < cfg.steps; ++step) {
    const LossGradient lg = loss_and_gradient(p, ds);
    const double cost = std::sqrt(lg.loss);
    if (!std::isfinite(cost) || cost > limit) {
      throw Error(ErrorCode::Diverged, "cost " + std::to_string(cost) + " at step " + std::to_string(step));
    }
    if (step % cfg.record_every == 0) out.trace.push_back({step, cost});
    p.w1 -= cfg.learning_rate * lg.grad.w1;
    p.b1 -= cfg.learning_rate * lg.grad.b1;
    p.w2 -= cfg.learning_rate * lg.grad.w2;
    p.b2 -= cfg.learning_rate * lg.grad.b2;
  }
  const double final_cost = std::sqrt(loss_and_gradient(p, ds).loss);
  if (!std::isfinite(final_cost) || final_cost > limit) {
    throw Error(ErrorCode::Diverged, "final cost " + std::to_string(final_cost));
  }
  out.trace.push_back({cfg.steps, final_cost});
  return out;
}

CompareReport compare(const ClassifiedDataset& ds, const ShallowParams& gd_params,
                      const ShallowParams& constructive_params) {
  CompareReport r;
  r.gd = {cost_l2(gd_params, ds), cost_weighted(gd_params, ds)};
  r.constructive = {cost_l2(constructive_params, ds), cost_weighted(constructive_params, ds)};
  const PreparedDataset prep = prepare(ds);
  const auto bound = bound_general(ds, prep.stats, prep.pack);
  r.bound_general = bound.bound_l2;
  r.bound_deltap = bound.bound_deltap;
  if (ds.m() == ds.q()) {
    r.exact_min_weighted = exact_min_weighted(ds, prep.stats);
    Mat pre = gd_params.w1 * ds.x0();
    pre.colwise() += gd_params.b1;
    r.gd_in_fixed_point_region = numerical_rank(gd_params.w1) == ds.m() && pre.minCoeff() >= 0.0;
  }
  return r;
}

}  // namespace shallow
