#pragma once

#include <Eigen/Dense>

namespace shallow {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Singular values at or below `sv_tolerance * sigma_max` count as zero.
inline constexpr double kDefaultSvTolerance = 1e-10;

/// Moore-Penrose inverse of a full-column-rank matrix, ((AᵀA)⁻¹Aᵀ) evaluated
/// through the SVD. Throws RankDeficient when `a` is not of full column rank.
Mat penrose_inverse(const Mat& a, double sv_tolerance = kDefaultSvTolerance);

struct Projectors {
  Mat p;       // onto range(a)
  Mat p_perp;  // 1 - p
};

/// Orthogonal projector onto the column space of a full-column-rank matrix.
Projectors orthoprojector(const Mat& a, double sv_tolerance = kDefaultSvTolerance);

/// Orthogonal R with R p Rᵀ = diag(1,...,1,0,...,0), `rank` leading ones.
///
/// The rows of R are an orthonormal basis of range(p) followed by one of
/// range(1 - p). Each basis is built by Gram-Schmidt over the columns of the
/// respective projector, taking at every step the column with the largest
/// residual (lowest index on ties), and each vector is signed so that its
/// largest-magnitude entry is positive. The output depends only on `p`.
Mat diagonalizing_rotation(const Mat& p, int rank);

/// Number of singular values above `sv_tolerance` times the largest one.
int numerical_rank(const Mat& a, double sv_tolerance = kDefaultSvTolerance);

struct RankInfo {
  int rank = 0;
  // Some singular value lies within a factor 2 of the cutoff.
  bool marginal = false;
};

RankInfo rank_info(const Mat& a, double sv_tolerance = kDefaultSvTolerance);

/// Largest singular value.
double op_norm(const Mat& a);

inline double max_abs(const Mat& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

/// Projector data derived from the class-mean matrix (M x Q).
struct ProjectorPack {
  Mat pen;     // Q x M, Pen[means]
  Mat p;       // M x M
  Mat p_perp;  // M x M
  Mat r;       // M x M orthogonal, R P Rᵀ diagonal
  int rank = 0;
  double sv_tolerance = kDefaultSvTolerance;

  /// Diagonal of the idealized P_R = R P Rᵀ: `rank` ones then zeros.
  Vec range_indicator() const;
};

ProjectorPack make_projector_pack(const Mat& means, double sv_tolerance = kDefaultSvTolerance);

}  // namespace shallow
