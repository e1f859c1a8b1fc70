#pragma once

#include "shallow/linalg.hpp"

namespace shallow {

/// Weights and biases of the (M, M, Q) ReLU network.
struct ShallowParams {
  Mat w1;  // M x M
  Vec b1;  // M
  Mat w2;  // Q x M
  Vec b2;  // Q

  int m() const { return static_cast<int>(w1.cols()); }
  int q() const { return static_cast<int>(w2.rows()); }

  /// Throws DimensionError / InvalidInput on inconsistent or non-finite params.
  void validate() const;
};

/// Component-wise max(0, a).
inline Mat relu(const Mat& a) { return a.cwiseMax(0.0); }

struct ForwardPass {
  Mat pre;  // w1 x + b1 uᵀ
  Mat x1;   // relu(pre)
  Mat x2;   // w2 x1 + b2 uᵀ
};

ForwardPass forward(const ShallowParams& p, const Mat& x);

/// Output layer only.
inline Mat output(const ShallowParams& p, const Mat& x) { return forward(p, x).x2; }

}  // namespace shallow
