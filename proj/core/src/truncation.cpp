#include "shallow/truncation.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "shallow/cost.hpp"
#include "shallow/error.hpp"
#include "shallow/network.hpp"

namespace shallow {

namespace {

void check_shapes(const Mat& w1, const Vec& b1, const ClassifiedDataset& ds) {
  if (ds.m() != ds.q()) throw Error(ErrorCode::WrongRegime, "truncation analysis requires M = Q");
  if (w1.rows() != ds.m() || w1.cols() != ds.m() || b1.size() != ds.m()) {
    throw Error(ErrorCode::DimensionError, "first layer does not match dataset");
  }
}

}  // namespace

Mat truncate(const Mat& w1, const Vec& b1, const ClassifiedDataset& ds) {
  check_shapes(w1, b1, ds);
  if (numerical_rank(w1) < w1.rows()) throw Error(ErrorCode::SingularW1, "W1 is not invertible");
  Mat pre = w1 * ds.x0();
  pre.colwise() += b1;
  Mat shifted = relu(pre);
  shifted.colwise() -= b1;
  return w1.partialPivLu().solve(shifted);
}

RankPreservation is_rank_preserving(const Mat& tau_x0, const ClassifiedDataset& ds, double sv_tolerance) {
  const ClassifiedDataset truncated = ds.with_inputs(tau_x0);
  const RankInfo tau_rank = rank_info(tau_x0, sv_tolerance);
  const RankInfo tau_means = rank_info(class_means(truncated), sv_tolerance);
  const RankInfo x_rank = rank_info(ds.x0(), sv_tolerance);
  const RankInfo x_means = rank_info(class_means(ds), sv_tolerance);
  return {tau_rank.rank == x_rank.rank, tau_means.rank == x_means.rank,
          tau_rank.marginal || tau_means.marginal};
}

TruncationResult min_over_output_layer(const Mat& w1, const Vec& b1, const ClassifiedDataset& ds, bool force) {
  TruncationResult r;
  r.tau_x0 = truncate(w1, b1, ds);
  Mat pre = w1 * ds.x0();
  pre.colwise() += b1;
  r.in_fixed_point_region = pre.minCoeff() >= 0.0;
  r.fixed_point_defect = max_abs(r.tau_x0 - ds.x0());

  const auto flags = is_rank_preserving(r.tau_x0, ds);
  r.rank_x0_preserved = flags.inputs;
  r.rank_means_preserved = flags.means;
  r.rank_marginal = flags.marginal;
  if (!(flags.inputs && flags.means) && !force) return r;

  const ClassifiedDataset truncated = ds.with_inputs(r.tau_x0);
  const Mat means = class_means(truncated);
  if (numerical_rank(means) < ds.q()) {
    throw Error(ErrorCode::SingularTruncatedMeans, "truncated class means are singular");
  }
  const PreparedDataset prep = prepare(truncated);
  const RelativeDeviations rel = relative_deviations(truncated, prep.stats);
  r.min_cost_weighted = closed_form_minimum(ds.y(), rel.delta2_rel).value;
  r.delta_p_tr = rel.delta1_rel.colwise().norm().maxCoeff();
  r.first_order_estimate_tr = weighted_norm(ds.y() * rel.delta1_rel, ds);
  r.delta1_rel_tr = rel.delta1_rel;
  r.delta2_rel_tr = rel.delta2_rel;
  r.projector_residual_tr = projector_residual_norm(truncated);

  const Mat hidden = relu(pre);
  r.tied_lsq_min = solve_output_layer(hidden, b1, ds, BiasMode::Tied).cost_weighted;
  r.affine_lsq_min = solve_output_layer(hidden, b1, ds, BiasMode::Free).cost_weighted;
  return r;
}

std::vector<TruncationResult> sweep_fixed_point_region(const ClassifiedDataset& ds,
                                                       const std::vector<FirstLayer>& grid) {
  if (ds.m() != ds.q()) throw Error(ErrorCode::WrongRegime, "truncation sweep requires M = Q");
  std::vector<TruncationResult> out(grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      try {
        out[i] = min_over_output_layer(grid[i].w1, grid[i].b1, ds);
      } catch (const Error& e) {
        out[i].error = e.what();
      }
    }
  };
  const std::size_t threads =
      std::min<std::size_t>(grid.size(), std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace shallow
