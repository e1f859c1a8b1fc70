#pragma once

#include <optional>

#include "shallow/cost.hpp"
#include "shallow/dataset.hpp"
#include "shallow/network.hpp"

namespace shallow {

enum class Variant { GeneralQleM, ExactQeqQ };

struct ConstructiveConfig {
  /// Slack added on top of 2ρ for β₁; unset means 0.5ρ.
  std::optional<double> beta1_margin;
  Variant variant = Variant::GeneralQleM;

  double beta1(double rho) const;
};

/// Values recorded alongside constructively built parameters.
struct Provenance {
  Variant variant = Variant::GeneralQleM;
  double beta1 = 0.0;
  double delta = 0.0;
  double delta_p = 0.0;
  double rho = 0.0;
  double bound_l2 = 0.0;
  double bound_deltap = 0.0;
  std::optional<double> exact_min_weighted;
};

struct TrainedNetwork {
  ShallowParams params;
  Provenance provenance;
};

/// Y Pen[means], the output map matching each class mean to its target.
Mat w2_tilde(const ClassifiedDataset& ds, const ProjectorPack& pack);

/// General Q <= M construction:
///   W1 = R, b1 = β₁ P_R u - δ P_R⊥ u, W2 = Y Pen P Rᵀ, b2 = -W2 P_R b1.
/// Verifies that the ReLU is the identity on the P_R rows (BetaTooSmall
/// otherwise), that it annihilates the P_R⊥ rows, and that the cost does not
/// exceed the bound.
ShallowParams train_general(const ClassifiedDataset& ds, const DatasetStats& stats, const ProjectorPack& pack,
                            const ConstructiveConfig& cfg);

/// M = Q exact minimizer: W1 = 1, b1 = β₁ u, W2 = Y meansᵀ (X0 N⁻¹ X0ᵀ)⁻¹,
/// b2 = -W2 b1.
ShallowParams train_exact_meq(const ClassifiedDataset& ds, const DatasetStats& stats,
                              const ConstructiveConfig& cfg);

/// Dispatches on cfg.variant and fills in provenance.
TrainedNetwork train(const ClassifiedDataset& ds, const PreparedDataset& prepared, const ConstructiveConfig& cfg);

/// Output layer refit with b2 tied to -W2 shift, solving
///   W2 (Z̄ Z̄ᵀ + ΔZ N⁻¹ ΔZᵀ) = Y Z̄ᵀ,   Z = hidden - shift uᵀ,
/// where Z̄ are the per-class means of Z and ΔZ the deviations.
OutputLayerFit resolve_output_layer_normal_equations(const Mat& hidden, const Vec& shift,
                                                     const ClassifiedDataset& ds);

}  // namespace shallow
