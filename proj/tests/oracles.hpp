#pragma once

// Reference computations for the tests. Everything here takes a different
// route from the library: explicit loops, normal equations, direct inverses.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <vector>

#include "shallow/dataset.hpp"
#include "shallow/network.hpp"

namespace oracle {

using shallow::Mat;
using shallow::Vec;

// (AᵀA)⁻¹Aᵀ by Cholesky on the normal equations.
inline Mat pinv_normal(const Mat& a) {
  const Mat ata = a.transpose() * a;
  return ata.llt().solve(a.transpose());
}

inline Mat projector_normal(const Mat& a) { return a * pinv_normal(a); }

inline Mat class_means_loop(const Mat& x0, const std::vector<int>& sizes) {
  Mat means = Mat::Zero(x0.rows(), static_cast<Eigen::Index>(sizes.size()));
  int col = 0;
  for (std::size_t j = 0; j < sizes.size(); ++j) {
    for (int i = 0; i < sizes[j]; ++i, ++col) means.col(static_cast<Eigen::Index>(j)) += x0.col(col);
    means.col(static_cast<Eigen::Index>(j)) /= sizes[j];
  }
  return means;
}

inline std::vector<double> column_weights(const std::vector<int>& sizes) {
  std::vector<double> w;
  for (int s : sizes)
    for (int i = 0; i < s; ++i) w.push_back(1.0 / s);
  return w;
}

inline Mat y_ext_loop(const Mat& y, const std::vector<int>& sizes) {
  int n = 0;
  for (int s : sizes) n += s;
  Mat out(y.rows(), n);
  int col = 0;
  for (std::size_t j = 0; j < sizes.size(); ++j)
    for (int i = 0; i < sizes[j]; ++i) out.col(col++) = y.col(static_cast<Eigen::Index>(j));
  return out;
}

inline double weighted_norm_loop(const Mat& r, const std::vector<int>& sizes) {
  const auto w = column_weights(sizes);
  double s = 0.0;
  for (Eigen::Index c = 0; c < r.cols(); ++c) s += w[static_cast<std::size_t>(c)] * r.col(c).squaredNorm();
  return std::sqrt(s);
}

// Weighted least squares by normal equations. `design` is K x N; returns the
// minimal weighted residual norm of Y^ext - C design over C.
inline double weighted_lsq_residual(const Mat& design, const Mat& y_ext, const std::vector<int>& sizes,
                                    Mat* coef = nullptr) {
  const auto w = column_weights(sizes);
  Mat dw = design;
  for (Eigen::Index c = 0; c < dw.cols(); ++c) dw.col(c) *= w[static_cast<std::size_t>(c)];
  const Mat gram = dw * design.transpose();
  const Mat rhs = y_ext * dw.transpose();
  const Mat c = gram.ldlt().solve(rhs.transpose()).transpose();
  if (coef) *coef = c;
  return weighted_norm_loop(y_ext - c * design, sizes);
}

// min over (W2, b2) of the weighted cost with hidden layer `hidden`
// (affine least squares, intercept free).
inline double brute_force_affine(const Mat& hidden, const Mat& y, const std::vector<int>& sizes) {
  Mat design(hidden.rows() + 1, hidden.cols());
  design.topRows(hidden.rows()) = hidden;
  design.bottomRows(1).setOnes();
  return weighted_lsq_residual(design, y_ext_loop(y, sizes), sizes);
}

// min over W2 with b2 = -W2 shift.
inline double brute_force_tied(const Mat& hidden, const Vec& shift, const Mat& y, const std::vector<int>& sizes) {
  const Mat z = hidden.colwise() - shift;
  return weighted_lsq_residual(z, y_ext_loop(y, sizes), sizes);
}

// N⁻¹X0ᵀ(X0 N⁻¹X0ᵀ)⁻¹X0 with explicit inverses.
inline Mat data_projector_direct(const Mat& x0, const std::vector<int>& sizes) {
  const auto w = column_weights(sizes);
  Mat ninv = Mat::Zero(x0.cols(), x0.cols());
  for (Eigen::Index c = 0; c < x0.cols(); ++c) ninv(c, c) = w[static_cast<std::size_t>(c)];
  const Mat g = x0 * ninv * x0.transpose();
  return ninv * x0.transpose() * g.inverse() * x0;
}

// Δ2 as the weighted sum of per-sample outer products of means⁻¹ dev.
inline Mat delta2_outer(const Mat& x0, const std::vector<int>& sizes) {
  const Mat means = class_means_loop(x0, sizes);
  const Mat minv = means.inverse();
  Mat d2 = Mat::Zero(means.cols(), means.cols());
  int col = 0;
  for (std::size_t j = 0; j < sizes.size(); ++j) {
    for (int i = 0; i < sizes[j]; ++i, ++col) {
      const Vec d = minv * (x0.col(col) - means.col(static_cast<Eigen::Index>(j)));
      d2 += d * d.transpose() / sizes[j];
    }
  }
  return d2;
}

// Entrywise definition of the truncation map.
inline Mat truncate_loop(const Mat& w1, const Vec& b1, const Mat& x0) {
  Mat act(x0.rows(), x0.cols());
  const Mat pre = w1 * x0;
  for (Eigen::Index c = 0; c < x0.cols(); ++c)
    for (Eigen::Index r = 0; r < x0.rows(); ++r) act(r, c) = std::max(0.0, pre(r, c) + b1(r)) - b1(r);
  return w1.inverse() * act;
}

inline double cost_l2_loop(const shallow::ShallowParams& p, const Mat& x0, const Mat& y,
                           const std::vector<int>& sizes) {
  const Mat yext = y_ext_loop(y, sizes);
  double s = 0.0;
  for (Eigen::Index c = 0; c < x0.cols(); ++c) {
    const Vec h = (p.w1 * x0.col(c) + p.b1).cwiseMax(0.0);
    s += (p.w2 * h + p.b2 - yext.col(c)).squaredNorm();
  }
  return std::sqrt(s / static_cast<double>(x0.cols()));
}

// Central differences of f over the entries of `a`.
inline Mat finite_difference(Mat a, const std::function<double(const Mat&)>& f, double h = 1e-6) {
  Mat g(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double orig = a.data()[i];
    a.data()[i] = orig + h;
    const double up = f(a);
    a.data()[i] = orig - h;
    const double down = f(a);
    a.data()[i] = orig;
    g.data()[i] = (up - down) / (2 * h);
  }
  return g;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

// Class 1 = {(1.1, 0), (0.9, 0)}, class 2 = {(0, 1.1), (0, 0.9)}.
inline shallow::ClassifiedDataset delta_point_one() {
  Mat x0(2, 4);
  x0 << 1.1, 0.9, 0.0, 0.0,  //
      0.0, 0.0, 1.1, 0.9;
  return shallow::ClassifiedDataset(x0, {2, 2});
}

inline shallow::ClassifiedDataset zero_noise_identity() {
  Mat x0(2, 4);
  x0 << 1, 1, 0, 0,  //
      0, 0, 1, 1;
  return shallow::ClassifiedDataset(x0, {2, 2});
}

}  // namespace oracle
