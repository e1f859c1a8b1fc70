#include "shallow/constructive.hpp"

#include <cmath>
#include <string>

#include "shallow/error.hpp"

namespace shallow {

double ConstructiveConfig::beta1(double rho) const {
  const double margin = beta1_margin.value_or(0.5 * rho);
  if (margin < 0.0) throw Error(ErrorCode::InvalidInput, "beta1 margin must be >= 0");
  return 2.0 * rho + margin;
}

Mat w2_tilde(const ClassifiedDataset& ds, const ProjectorPack& pack) { return ds.y() * pack.pen; }

ShallowParams train_general(const ClassifiedDataset& ds, const DatasetStats& stats, const ProjectorPack& pack,
                            const ConstructiveConfig& cfg) {
  if (pack.rank != ds.q() || pack.p.rows() != ds.m()) {
    throw Error(ErrorCode::RankDeficient, "projector pack rank does not equal Q");
  }
  const int m = ds.m();
  const int q = ds.q();
  const double beta1 = cfg.beta1(stats.rho);
  const Vec on_range = pack.range_indicator();
  const Vec off_range = Vec::Ones(m) - on_range;

  ShallowParams p;
  p.w1 = pack.r;
  const Vec pr_b1 = beta1 * on_range;
  p.b1 = pr_b1 - stats.delta * off_range;
  p.w2 = ds.y() * pack.pen * pack.p * pack.r.transpose();
  p.b2 = -p.w2 * pr_b1;

  // Hidden pre-activations split along the diagonal projector pair.
  const Mat rotated = pack.r * ds.x0();
  const double scale = std::max(1.0, stats.rho + beta1);
  const double tol = 1e-12 * scale;
  const Mat range_block = (pack.r * (pack.p * ds.x0())).topRows(q).colwise() + pr_b1.head(q);
  if (range_block.size() && range_block.minCoeff() < 0.0) {
    throw Error(ErrorCode::BetaTooSmall,
                "positivity fails on the range block (min " + std::to_string(range_block.minCoeff()) + ")");
  }
  if (m > q) {
    const Mat null_block = rotated.bottomRows(m - q).array() + p.b1(m - 1);
    if (null_block.maxCoeff() > tol) {
      throw Error(ErrorCode::InvalidInput, "complement block survives the ReLU (max " +
                                               std::to_string(null_block.maxCoeff()) + ")");
    }
  }
  const double cost = cost_l2(p, ds);
  const double bound = bound_general(ds, stats, pack).bound_l2;
  if (cost > bound + 1e-10 * (1.0 + bound)) {
    throw Error(ErrorCode::InvalidInput,
                "constructed cost " + std::to_string(cost) + " exceeds bound " + std::to_string(bound));
  }
  return p;
}

ShallowParams train_exact_meq(const ClassifiedDataset& ds, const DatasetStats& stats,
                              const ConstructiveConfig& cfg) {
  if (ds.m() != ds.q()) throw Error(ErrorCode::WrongRegime, "exact minimizer requires M = Q");
  if (numerical_rank(stats.means) < ds.q()) throw Error(ErrorCode::SingularMeans, "class means are singular");
  const int q = ds.q();
  const double beta1 = cfg.beta1(stats.rho);
  const Mat gram = ds.x0() * ds.inverse_weights().asDiagonal() * ds.x0().transpose();
  if (numerical_rank(gram) < q) throw Error(ErrorCode::SingularGram, "X0 N⁻¹ X0ᵀ is singular");

  ShallowParams p;
  p.w1 = Mat::Identity(q, q);
  p.b1 = Vec::Constant(q, beta1);
  // W2 G = Y meansᵀ with G symmetric.
  const Mat rhs = ds.y() * stats.means.transpose();
  p.w2 = gram.partialPivLu().solve(rhs.transpose()).transpose();
  p.b2 = -p.w2 * p.b1;

  const Mat pre = (ds.x0().colwise() + p.b1);
  if (pre.size() && pre.minCoeff() < 0.0) {
    throw Error(ErrorCode::BetaTooSmall, "W1 X0 + B1 has negative entries");
  }
  return p;
}

TrainedNetwork train(const ClassifiedDataset& ds, const PreparedDataset& prepared, const ConstructiveConfig& cfg) {
  TrainedNetwork out;
  const auto& st = prepared.stats;
  out.params = cfg.variant == Variant::ExactQeqQ ? train_exact_meq(ds, st, cfg)
                                                  : train_general(ds, st, prepared.pack, cfg);
  const auto bound = bound_general(ds, st, prepared.pack);
  out.provenance = {cfg.variant, cfg.beta1(st.rho), st.delta, st.delta_p, st.rho, bound.bound_l2,
                    bound.bound_deltap, std::nullopt};
  if (ds.m() == ds.q()) out.provenance.exact_min_weighted = exact_min_weighted(ds, st);
  return out;
}

OutputLayerFit resolve_output_layer_normal_equations(const Mat& hidden, const Vec& shift,
                                                     const ClassifiedDataset& ds) {
  if (hidden.cols() != ds.n() || shift.size() != hidden.rows()) {
    throw Error(ErrorCode::DimensionError, "hidden layer shape does not match dataset");
  }
  const Mat z = hidden.colwise() - shift;
  const ClassifiedDataset shifted(z, ds.class_sizes(), ds.y());
  const Mat zbar = class_means(shifted);
  Mat dz(z.rows(), z.cols());
  for (int j = 0; j < ds.q(); ++j) {
    dz.middleCols(ds.offset(j), ds.class_size(j)) = shifted.class_block(j).colwise() - zbar.col(j);
  }
  const Mat lhs = zbar * zbar.transpose() + dz * ds.inverse_weights().asDiagonal() * dz.transpose();
  if (numerical_rank(lhs) < lhs.rows()) throw Error(ErrorCode::SingularGram, "normal equations are singular");
  const Mat rhs = ds.y() * zbar.transpose();

  OutputLayerFit fit;
  fit.w2 = lhs.partialPivLu().solve(rhs.transpose()).transpose();
  fit.b2 = -fit.w2 * shift;
  Mat out = fit.w2 * hidden;
  out.colwise() += fit.b2;
  fit.cost_weighted = weighted_norm(out - y_ext(ds), ds);
  return fit;
}

}  // namespace shallow
