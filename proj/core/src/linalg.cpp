#include "shallow/linalg.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "shallow/error.hpp"

namespace shallow {

namespace {

constexpr double kProjectorTolerance = 1e-8;

Eigen::JacobiSVD<Mat> thin_svd(const Mat& a) {
  return Eigen::JacobiSVD<Mat>(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
}

// Orthonormal basis (as columns) of the span of `proj`'s columns, extending
// `existing`. Largest-residual pivoting keeps the normalization well
// conditioned; re-projecting through `proj` removes drift out of the range.
void extend_basis(const Mat& proj, int count, std::vector<Vec>& basis) {
  const Eigen::Index m = proj.rows();
  auto orthogonalize = [&](Vec v) {
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vec& q : basis) v -= q.dot(v) * q;
    }
    return v;
  };
  for (int k = 0; k < count; ++k) {
    Eigen::Index best = -1;
    double best_norm = 0.0;
    Vec best_res;
    for (Eigen::Index c = 0; c < m; ++c) {
      Vec res = orthogonalize(proj.col(c));
      const double n = res.norm();
      if (n > best_norm) {
        best_norm = n;
        best = c;
        best_res = std::move(res);
      }
    }
    if (best < 0 || best_norm < 1e-6) {
      throw Error(ErrorCode::NotAProjector, "projector range smaller than requested rank");
    }
    Vec q = best_res / best_norm;
    q = orthogonalize(proj * q);
    q.normalize();
    Eigen::Index arg = 0;
    for (Eigen::Index i = 1; i < m; ++i) {
      if (std::abs(q(i)) > std::abs(q(arg))) arg = i;
    }
    if (q(arg) < 0) q = -q;
    basis.push_back(std::move(q));
  }
}

}  // namespace

Mat penrose_inverse(const Mat& a, double sv_tolerance) {
  if (a.rows() < a.cols() || a.cols() == 0) {
    throw Error(ErrorCode::DimensionError, "penrose_inverse needs rows >= cols > 0");
  }
  const auto svd = thin_svd(a);
  const Vec& s = svd.singularValues();
  const double smax = s(0);
  const double smin = s(s.size() - 1);
  if (!(smax > 0.0) || smin <= sv_tolerance * smax) {
    throw Error(ErrorCode::RankDeficient, "matrix is not of full column rank (sigma_min/sigma_max = " +
                                              std::to_string(smax > 0 ? smin / smax : 0.0) + ")");
  }
  return svd.matrixV() * s.cwiseInverse().asDiagonal() * svd.matrixU().transpose();
}

Projectors orthoprojector(const Mat& a, double sv_tolerance) {
  const Mat pen = penrose_inverse(a, sv_tolerance);
  Mat p = a * pen;
  p = 0.5 * (p + p.transpose()).eval();
  Mat p_perp = Mat::Identity(p.rows(), p.cols()) - p;
  return {std::move(p), std::move(p_perp)};
}

Mat diagonalizing_rotation(const Mat& p, int rank) {
  const Eigen::Index m = p.rows();
  if (p.cols() != m || rank <= 0 || rank > m) {
    throw Error(ErrorCode::DimensionError, "diagonalizing_rotation needs square p and 0 < rank <= M");
  }
  const double idem = max_abs(p * p - p);
  const double sym = max_abs(p - p.transpose());
  const double trace_gap = std::abs(p.trace() - rank);
  if (idem > kProjectorTolerance || sym > kProjectorTolerance || trace_gap > 1e-6) {
    throw Error(ErrorCode::NotAProjector,
                "idempotence defect " + std::to_string(idem) + ", asymmetry " + std::to_string(sym) +
                    ", trace gap " + std::to_string(trace_gap));
  }
  std::vector<Vec> basis;
  basis.reserve(static_cast<std::size_t>(m));
  extend_basis(p, rank, basis);
  const Mat p_perp = Mat::Identity(m, m) - p;
  extend_basis(p_perp, static_cast<int>(m) - rank, basis);

  Mat r(m, m);
  for (Eigen::Index i = 0; i < m; ++i) r.row(i) = basis[static_cast<std::size_t>(i)].transpose();
  return r;
}

int numerical_rank(const Mat& a, double sv_tolerance) { return rank_info(a, sv_tolerance).rank; }

RankInfo rank_info(const Mat& a, double sv_tolerance) {
  RankInfo info;
  if (a.size() == 0) return info;
  const Vec s = Eigen::JacobiSVD<Mat>(a).singularValues();
  const double smax = s(0);
  if (!(smax > 0.0)) return info;
  const double cutoff = sv_tolerance * smax;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff) ++info.rank;
    if (s(i) > 0.5 * cutoff && s(i) < 2.0 * cutoff) info.marginal = true;
  }
  return info;
}

double op_norm(const Mat& a) {
  if (a.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Mat>(a).singularValues()(0);
}

Vec ProjectorPack::range_indicator() const {
  Vec d = Vec::Zero(p.rows());
  d.head(rank).setOnes();
  return d;
}

ProjectorPack make_projector_pack(const Mat& means, double sv_tolerance) {
  ProjectorPack pack;
  pack.sv_tolerance = sv_tolerance;
  pack.pen = penrose_inverse(means, sv_tolerance);
  auto [p, p_perp] = orthoprojector(means, sv_tolerance);
  pack.p = std::move(p);
  pack.p_perp = std::move(p_perp);
  pack.rank = static_cast<int>(means.cols());
  pack.r = diagonalizing_rotation(pack.p, pack.rank);
  return pack;
}

}  // namespace shallow
