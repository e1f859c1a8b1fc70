#include "shallow/cost.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "shallow/error.hpp"

namespace shallow {

namespace {

void require_square(const ClassifiedDataset& ds, const char* what) {
  if (ds.m() != ds.q()) {
    throw Error(ErrorCode::WrongRegime, std::string(what) + " requires M = Q (got M=" + std::to_string(ds.m()) +
                                            ", Q=" + std::to_string(ds.q()) + ")");
  }
}

Mat residual(const ShallowParams& p, const ClassifiedDataset& ds) {
  if (p.m() != ds.m() || p.q() != ds.q()) throw Error(ErrorCode::DimensionError, "params do not match dataset");
  return output(p, ds.x0()) - y_ext(ds);
}

// X0 N⁻¹ X0ᵀ with a singularity check.
Eigen::PartialPivLU<Mat> weighted_gram(const ClassifiedDataset& ds) {
  const Mat gram = ds.x0() * ds.inverse_weights().asDiagonal() * ds.x0().transpose();
  if (numerical_rank(gram) < gram.rows()) throw Error(ErrorCode::SingularGram, "X0 N⁻¹ X0ᵀ is singular");
  return Eigen::PartialPivLU<Mat>(gram);
}

}  // namespace

double weighted_norm(const Mat& a, const ClassifiedDataset& ds) {
  if (a.cols() != ds.n()) throw Error(ErrorCode::DimensionError, "weighted_norm column count != N");
  const Vec w = ds.inverse_weights();
  return std::sqrt((a.colwise().squaredNorm().transpose().array() * w.array()).sum());
}

double cost_l2(const ShallowParams& p, const ClassifiedDataset& ds) {
  return residual(p, ds).norm() / std::sqrt(static_cast<double>(ds.n()));
}

double cost_weighted(const ShallowParams& p, const ClassifiedDataset& ds) {
  return weighted_norm(residual(p, ds), ds);
}

DataProjector data_projector(const ClassifiedDataset& ds) {
  require_square(ds, "data_projector");
  if (ds.n() > kMaxMaterializedProjector) {
    throw Error(ErrorCode::ProblemTooLarge, "data projector is not formed for N > " +
                                                std::to_string(kMaxMaterializedProjector));
  }
  const auto lu = weighted_gram(ds);
  DataProjector out;
  out.p_script = ds.inverse_weights().asDiagonal() * ds.x0().transpose() * lu.solve(ds.x0());
  out.p_script_perp = Mat::Identity(ds.n(), ds.n()) - out.p_script;
  return out;
}

double projector_residual_norm(const ClassifiedDataset& ds) {
  require_square(ds, "projector_residual_norm");
  const Mat yext = y_ext(ds);
  if (ds.n() <= kMaxMaterializedProjector) {
    return weighted_norm(yext * data_projector(ds).p_script_perp, ds);
  }
  // Y^ext P = (Y^ext N⁻¹ X0ᵀ) G⁻¹ X0 with G = X0 N⁻¹ X0ᵀ.
  const auto lu = weighted_gram(ds);
  const Mat cross = yext * ds.inverse_weights().asDiagonal() * ds.x0().transpose();
  // G is symmetric, so W = cross G⁻¹ = (G⁻¹ crossᵀ)ᵀ.
  const Mat w = lu.solve(cross.transpose()).transpose();
  return weighted_norm(yext - w * ds.x0(), ds);
}

RelativeDeviations relative_deviations(const ClassifiedDataset& ds, const DatasetStats& stats) {
  require_square(ds, "relative_deviations");
  if (numerical_rank(stats.means) < ds.q()) throw Error(ErrorCode::SingularMeans, "class means are singular");
  RelativeDeviations out;
  out.delta1_rel = stats.means.partialPivLu().solve(stats.dev);
  out.delta2_rel = out.delta1_rel * ds.inverse_weights().asDiagonal() * out.delta1_rel.transpose();
  out.delta2_rel = 0.5 * (out.delta2_rel + out.delta2_rel.transpose()).eval();
  return out;
}

ClosedFormMinimum closed_form_minimum(const Mat& y, const Mat& delta2_rel) {
  Eigen::SelfAdjointEigenSolver<Mat> eig(delta2_rel);
  Vec lambda = eig.eigenvalues();
  const double top = lambda.size() ? lambda.maxCoeff() : 0.0;
  const double bottom = lambda.size() ? lambda.minCoeff() : 0.0;
  if (bottom < -1e-12 * std::max(1.0, top)) {
    throw Error(ErrorCode::NotPositiveSemidefinite,
                "relative deviation Gram has eigenvalue " + std::to_string(bottom));
  }
  lambda = lambda.cwiseMax(0.0);
  const Vec f = (lambda.array() / (1.0 + lambda.array())).sqrt();
  const Mat v = eig.eigenvectors();
  const Mat factor = v * f.asDiagonal() * v.transpose();
  return {(y * factor).norm(), lambda.minCoeff(), lambda.maxCoeff()};
}

double exact_min_weighted(const ClassifiedDataset& ds, const DatasetStats& stats) {
  return closed_form_minimum(ds.y(), relative_deviations(ds, stats).delta2_rel).value;
}

double first_order_estimate(const ClassifiedDataset& ds, const DatasetStats& stats) {
  return weighted_norm(ds.y() * relative_deviations(ds, stats).delta1_rel, ds);
}

GeneralBound bound_general(const ClassifiedDataset& ds, const DatasetStats& stats, const ProjectorPack& pack) {
  GeneralBound b;
  b.bound_l2 = (ds.y() * pack.pen * pack.p * stats.dev).norm() / std::sqrt(static_cast<double>(ds.n()));
  b.bound_deltap = op_norm(ds.y()) * stats.delta_p;
  return b;
}

OutputLayerFit solve_output_layer(const Mat& hidden, const Vec& shift, const ClassifiedDataset& ds,
                                  BiasMode mode) {
  if (hidden.cols() != ds.n() || shift.size() != hidden.rows()) {
    throw Error(ErrorCode::DimensionError, "hidden layer shape does not match dataset");
  }
  const Eigen::Index m = hidden.rows();
  const Eigen::Index n = hidden.cols();
  const Vec sw = ds.inverse_weights().cwiseSqrt();
  const Mat yext = y_ext(ds);

  const Eigen::Index cols = mode == BiasMode::Free ? m + 1 : m;
  Mat design(n, cols);
  if (mode == BiasMode::Free) {
    design.leftCols(m) = hidden.transpose();
    design.col(m).setOnes();
  } else {
    design = (hidden.colwise() - shift).transpose();
  }
  design = sw.asDiagonal() * design;
  const Mat rhs = sw.asDiagonal() * yext.transpose();
  const Mat coef = design.colPivHouseholderQr().solve(rhs);

  OutputLayerFit fit;
  fit.w2 = coef.topRows(m).transpose();
  if (mode == BiasMode::Free) {
    fit.b2 = coef.row(m).transpose();
  } else {
    fit.b2 = -fit.w2 * shift;
  }
  Mat res = fit.w2 * hidden;
  res.colwise() += fit.b2;
  fit.cost_weighted = weighted_norm(res - yext, ds);
  return fit;
}

CostReport evaluate(const ShallowParams& p, const ClassifiedDataset& ds, const PreparedDataset& prepared,
                    bool include_matrices) {
  CostReport r;
  r.cost_l2 = cost_l2(p, ds);
  r.cost_weighted = cost_weighted(p, ds);
  const auto bound = bound_general(ds, prepared.stats, prepared.pack);
  r.bound_general = bound.bound_l2;
  r.bound_deltap = bound.bound_deltap;
  r.delta = prepared.stats.delta;
  r.delta_p = prepared.stats.delta_p;
  r.rho = prepared.stats.rho;
  if (ds.m() == ds.q()) {
    const auto rel = relative_deviations(ds, prepared.stats);
    const auto cf = closed_form_minimum(ds.y(), rel.delta2_rel);
    r.exact_min_weighted = cf.value;
    r.lambda_min = cf.lambda_min;
    r.lambda_max = cf.lambda_max;
    r.projector_residual = projector_residual_norm(ds);
    r.first_order_estimate = weighted_norm(ds.y() * rel.delta1_rel, ds);
    if (include_matrices) {
      r.delta1_rel = rel.delta1_rel;
      r.delta2_rel = rel.delta2_rel;
    }
  }
  return r;
}

}  // namespace shallow
