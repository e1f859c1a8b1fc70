#include "shallow/rng.hpp"

#include <cmath>
#include <numbers>

namespace shallow {

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Mat uniform_matrix(Eigen::Index rows, Eigen::Index cols, double lo, double hi, Rng& rng) {
  Mat a(rows, cols);
  // Column-major fill order is part of the reproducibility contract.
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) a(i, j) = rng.uniform(lo, hi);
  return a;
}

Mat gaussian_matrix(Eigen::Index rows, Eigen::Index cols, double scale, Rng& rng) {
  Mat a(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) a(i, j) = scale * rng.normal();
  return a;
}

Mat random_orthogonal(Eigen::Index n, Rng& rng) {
  const Mat g = gaussian_matrix(n, n, 1.0, rng);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (r(i, i) < 0) q.col(i) = -q.col(i);
  }
  return q;
}

Mat random_invertible(Eigen::Index n, double max_condition, Rng& rng) {
  const Mat u = random_orthogonal(n, rng);
  const Mat v = random_orthogonal(n, rng);
  Vec s(n);
  const double log_max = std::log(max_condition);
  for (Eigen::Index i = 0; i < n; ++i) s(i) = std::exp(rng.uniform(0.0, log_max));
  return u * s.asDiagonal() * v.transpose();
}

}  // namespace shallow
