#pragma once

#include <optional>
#include <vector>

#include "shallow/dataset.hpp"
#include "shallow/network.hpp"

namespace shallow {

/// Scores closer than this (relative) are treated as tied; ties go to the
/// lowest class index.
inline constexpr double kTieTolerance = 1e-12;
inline constexpr double kAgreementTolerance = 1e-9;

/// Everything the metric form of the matching rule needs.
struct MetricGeometry {
  Mat w2_tilde;  // Q x M
  Mat p;         // M x M projector onto span of the class means
  Mat means;     // M x Q
};

MetricGeometry make_geometry(const ClassifiedDataset& ds, const ProjectorPack& pack);

/// |network(x) - y_j| for every class j.
std::vector<double> score(const ShallowParams& params, const Vec& x, const ClassifiedDataset& ds);

/// |W̃2 P (x - y)|. P is applied internally, so any x, y are accepted.
double metric(const Mat& w2_tilde, const Mat& p, const Vec& x, const Vec& y);

struct ClassificationOutcome {
  std::vector<double> scores;
  int winner = 0;
  std::vector<double> metric_scores;  // empty when no geometry was given
  std::optional<bool> agreement;      // unset when no geometry was given
};

int argmin_lowest_index(const std::vector<double>& values, double tie_tolerance = kTieTolerance);

/// Network scores and, with `geometry`, the metric scores d(Px, mean_j) with
/// their componentwise agreement. The metric equivalence only holds for the
/// constructive general-case parameters; pass no geometry for other params.
ClassificationOutcome classify(const ShallowParams& params, const std::optional<MetricGeometry>& geometry,
                               const ClassifiedDataset& ds, const Vec& x);

/// Column-wise classification of a batch (M x K).
std::vector<ClassificationOutcome> classify_batch(const ShallowParams& params,
                                                  const std::optional<MetricGeometry>& geometry,
                                                  const ClassifiedDataset& ds, const Mat& xs);

}  // namespace shallow
