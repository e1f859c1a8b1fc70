#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "shallow/dataset.hpp"
#include "shallow/network.hpp"

namespace shallow {

struct GdConfig {
  double learning_rate = 1e-2;
  int steps = 20000;
  std::uint64_t seed = 0;
  double init_scale = 0.1;
  int record_every = 100;

  void validate() const;
};

struct TracePoint {
  int step = 0;
  double cost_l2 = 0.0;
};

struct GdResult {
  ShallowParams params;
  std::vector<TracePoint> trace;
};

/// Squared cost 𝒞² and its gradient (ReLU derivative taken as 0 at 0).
struct LossGradient {
  double loss = 0.0;
  ShallowParams grad;
};
LossGradient loss_and_gradient(const ShallowParams& p, const ClassifiedDataset& ds);

/// Initial parameters: Gaussian weights with std `init_scale`, b1 set to
/// `init_scale` in every component so no hidden unit starts dead on data
/// near the origin, b2 = 0.
ShallowParams initial_params(int m, int q, const GdConfig& cfg);

/// Full-batch gradient descent on 𝒞². Starts from `init` when given.
/// Throws Diverged once the cost exceeds 1e6 times its initial value.
GdResult train_gd(const ClassifiedDataset& ds, const GdConfig& cfg,
                  const std::optional<ShallowParams>& init = std::nullopt);

struct CompareRow {
  double cost_l2 = 0.0;
  double cost_weighted = 0.0;
};

struct CompareReport {
  CompareRow gd;
  CompareRow constructive;
  double bound_general = 0.0;
  double bound_deltap = 0.0;
  std::optional<double> exact_min_weighted;  // M = Q only
  std::optional<bool> gd_in_fixed_point_region;  // M = Q only
};

CompareReport compare(const ClassifiedDataset& ds, const ShallowParams& gd_params,
                      const ShallowParams& constructive_params);

}  // namespace shallow
