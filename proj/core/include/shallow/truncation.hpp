#pragma once

#include <optional>
#include <string>
#include <vector>

#include "shallow/dataset.hpp"

namespace shallow {

/// W1⁻¹ (relu(W1 X0 + B1) - B1). Requires M = Q and invertible W1.
Mat truncate(const Mat& w1, const Vec& b1, const ClassifiedDataset& ds);

struct RankPreservation {
  bool inputs = false;  // rank τ(X0) == rank X0
  bool means = false;   // rank of truncated class means == rank of class means
  bool marginal = false;
};

RankPreservation is_rank_preserving(const Mat& tau_x0, const ClassifiedDataset& ds,
                                    double sv_tolerance = kDefaultSvTolerance);

struct TruncationResult {
  Mat tau_x0;
  bool rank_x0_preserved = false;
  bool rank_means_preserved = false;
  bool rank_marginal = false;
  bool in_fixed_point_region = false;
  /// max |τ(X0) - X0|
  double fixed_point_defect = 0.0;
  /// Closed form ||Y |D|^{1/2}(1+D)^{-1/2}|| on the truncated data.
  std::optional<double> min_cost_weighted;
  std::optional<double> delta_p_tr;
  std::optional<double> first_order_estimate_tr;  // ||Y delta1_rel_tr||_{L²_N}
  std::optional<Mat> delta1_rel_tr;
  std::optional<Mat> delta2_rel_tr;
  /// ||Y^ext (1 - projector of τ(X0))||_{L²_N}.
  std::optional<double> projector_residual_tr;
  /// Output-layer least squares with b2 = -W2 b1.
  std::optional<double> tied_lsq_min;
  /// Output-layer least squares with a free intercept b2.
  std::optional<double> affine_lsq_min;
  /// Set when the point could not be evaluated (sweeps continue past it).
  std::optional<std::string> error;
};

/// Minimum of the weighted cost over (W2, b2) at fixed (W1, b1). With
/// `force`, evaluation proceeds even if the truncation is rank reducing and
/// throws SingularTruncatedMeans if the truncated means are singular.
TruncationResult min_over_output_layer(const Mat& w1, const Vec& b1, const ClassifiedDataset& ds,
                                       bool force = false);

struct FirstLayer {
  Mat w1;
  Vec b1;
};

/// Evaluates every grid point in parallel; output order matches `grid`.
std::vector<TruncationResult> sweep_fixed_point_region(const ClassifiedDataset& ds,
                                                       const std::vector<FirstLayer>& grid);

}  // namespace shallow
