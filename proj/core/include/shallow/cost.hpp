#pragma once

#include <optional>

#include "shallow/dataset.hpp"
#include "shallow/network.hpp"

namespace shallow {

/// Above this many samples the N x N data projector is never formed.
inline constexpr int kMaxMaterializedProjector = 5000;

/// Frobenius norm of a Q x N (or M x N) residual divided by sqrt(N).
double cost_l2(const ShallowParams& p, const ClassifiedDataset& ds);

/// sqrt( sum_j 1/N_j sum_i |residual_{j,i}|² ).
double cost_weighted(const ShallowParams& p, const ClassifiedDataset& ds);

/// ||a||_{L²_N}: column n weighted by 1/N_{class(n)}.
double weighted_norm(const Mat& a, const ClassifiedDataset& ds);

struct DataProjector {
  Mat p_script;       // N x N
  Mat p_script_perp;  // 1 - p_script
};

/// N⁻¹ X0ᵀ (X0 N⁻¹ X0ᵀ)⁻¹ X0. Requires M = Q and N <= kMaxMaterializedProjector.
DataProjector data_projector(const ClassifiedDataset& ds);

/// ||Y^ext (1 - data projector)||_{L²_N}; uses the explicit projector when
/// N is small enough and the factored form W X0 - Y^ext otherwise.
double projector_residual_norm(const ClassifiedDataset& ds);

struct RelativeDeviations {
  Mat delta1_rel;  // Q x N, means⁻¹ dev
  Mat delta2_rel;  // Q x Q, delta1 N⁻¹ delta1ᵀ
};

RelativeDeviations relative_deviations(const ClassifiedDataset& ds, const DatasetStats& stats);

struct ClosedFormMinimum {
  double value = 0.0;
  // Spectral range of delta2_rel after clamping round-off negatives to 0.
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

/// ||Y |D|^{1/2} (1 + D)^{-1/2}||_{L²} for symmetric PSD D.
ClosedFormMinimum closed_form_minimum(const Mat& y, const Mat& delta2_rel);

/// Weighted-cost value of the M = Q constructive minimizer, from the closed form.
double exact_min_weighted(const ClassifiedDataset& ds, const DatasetStats& stats);

/// ||Y delta1_rel||_{L²_N}, the first-order estimate dominating the exact value.
double first_order_estimate(const ClassifiedDataset& ds, const DatasetStats& stats);

struct GeneralBound {
  double bound_l2 = 0.0;      // ||Y Pen P dev||_{L²} / sqrt(N)
  double bound_deltap = 0.0;  // ||Y||_op * delta_p
};

GeneralBound bound_general(const ClassifiedDataset& ds, const DatasetStats& stats, const ProjectorPack& pack);

/// How the output bias is treated when fitting (W2, b2) to a hidden layer.
enum class BiasMode {
  /// b2 = -W2 shift, i.e. W2 is fit to (hidden - shift uᵀ) without intercept.
  Tied,
  /// b2 is a free intercept (ordinary affine least squares).
  Free,
};

struct OutputLayerFit {
  Mat w2;
  Vec b2;
  double cost_weighted = 0.0;
};

/// Weighted least squares for the output layer by column-pivoted QR on the
/// sqrt-weighted design matrix.
OutputLayerFit solve_output_layer(const Mat& hidden, const Vec& shift, const ClassifiedDataset& ds,
                                  BiasMode mode);

struct CostReport {
  double cost_l2 = 0.0;
  double cost_weighted = 0.0;
  double bound_general = 0.0;
  double bound_deltap = 0.0;
  double delta = 0.0;
  double delta_p = 0.0;
  double rho = 0.0;
  // Present only when M = Q.
  std::optional<double> exact_min_weighted;
  std::optional<double> projector_residual;
  std::optional<double> first_order_estimate;
  std::optional<double> lambda_min;
  std::optional<double> lambda_max;
  std::optional<Mat> delta1_rel;
  std::optional<Mat> delta2_rel;
};

CostReport evaluate(const ShallowParams& p, const ClassifiedDataset& ds, const PreparedDataset& prepared,
                    bool include_matrices = false);

}  // namespace shallow
