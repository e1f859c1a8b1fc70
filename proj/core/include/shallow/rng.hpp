#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "shallow/linalg.hpp"

namespace shallow {

/// Seeded generator used for every random draw in the project.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Uniform and normal variates are derived here rather than via
/// <random> distributions so that outputs do not depend on the standard
/// library implementation.
class Rng {
 public:
  static constexpr std::string_view kName = "mt19937_64/v1";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal (Box-Muller, one value per call).
  double normal();
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

Mat uniform_matrix(Eigen::Index rows, Eigen::Index cols, double lo, double hi, Rng& rng);
Mat gaussian_matrix(Eigen::Index rows, Eigen::Index cols, double scale, Rng& rng);

/// Haar-like orthogonal matrix: QR of a Gaussian matrix with the sign of R's
/// diagonal folded into Q.
Mat random_orthogonal(Eigen::Index n, Rng& rng);

/// Invertible matrix U diag(s) Vᵀ with singular values log-uniform in
/// [1, max_condition), so cond < max_condition.
Mat random_invertible(Eigen::Index n, double max_condition, Rng& rng);

}  // namespace shallow
