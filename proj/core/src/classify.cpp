#include "shallow/classify.hpp"

#include <cmath>

#include "shallow/error.hpp"

namespace shallow {

MetricGeometry make_geometry(const ClassifiedDataset& ds, const ProjectorPack& pack) {
  return {ds.y() * pack.pen, pack.p, class_means(ds)};
}

std::vector<double> score(const ShallowParams& params, const Vec& x, const ClassifiedDataset& ds) {
  if (x.size() != ds.m() || params.q() != ds.q()) throw Error(ErrorCode::DimensionError, "score shape mismatch");
  const Vec out = output(params, x);
  std::vector<double> s(static_cast<std::size_t>(ds.q()));
  for (int j = 0; j < ds.q(); ++j) s[static_cast<std::size_t>(j)] = (out - ds.y().col(j)).norm();
  return s;
}

double metric(const Mat& w2_tilde, const Mat& p, const Vec& x, const Vec& y) {
  return (w2_tilde * (p * (x - y))).norm();
}

int argmin_lowest_index(const std::vector<double>& values, double tie_tolerance) {
  int best = 0;
  for (int j = 1; j < static_cast<int>(values.size()); ++j) {
    const double b = values[static_cast<std::size_t>(best)];
    const double v = values[static_cast<std::size_t>(j)];
    if (v < b - tie_tolerance * std::max(1.0, std::abs(b))) best = j;
  }
  return best;
}

ClassificationOutcome classify(const ShallowParams& params, const std::optional<MetricGeometry>& geometry,
                               const ClassifiedDataset& ds, const Vec& x) {
  ClassificationOutcome out;
  out.scores = score(params, x, ds);
  out.winner = argmin_lowest_index(out.scores);
  if (geometry) {
    const Vec px = geometry->p * x;
    bool agree = true;
    for (int j = 0; j < ds.q(); ++j) {
      const double d = metric(geometry->w2_tilde, geometry->p, px, geometry->means.col(j));
      out.metric_scores.push_back(d);
      const double s = out.scores[static_cast<std::size_t>(j)];
      if (std::abs(s - d) > kAgreementTolerance * (1.0 + s)) agree = false;
    }
    out.agreement = agree;
  }
  return out;
}

std::vector<ClassificationOutcome> classify_batch(const ShallowParams& params,
                                                  const std::optional<MetricGeometry>& geometry,
                                                  const ClassifiedDataset& ds, const Mat& xs) {
  std::vector<ClassificationOutcome> out;
  out.reserve(static_cast<std::size_t>(xs.cols()));
  for (Eigen::Index k = 0; k < xs.cols(); ++k) out.push_back(classify(params, geometry, ds, xs.col(k)));
  return out;
}

}  // namespace shallow
