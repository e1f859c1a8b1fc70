#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shallow/dataset.hpp"

namespace shallow::verify {

enum class Suite { Bounds, ExactMin, Degeneracy, Invariance, Metric, Truncation, All };

Suite suite_from_string(const std::string& s);
std::string to_string(Suite s);
/// True for suites that only make sense when M = Q.
bool requires_square(Suite s);

struct PropertyCheck {
  std::string suite;
  std::string name;
  bool pass = true;
  double measured = 0.0;
  double tolerance = 0.0;
  /// Reported for context; never affects the verdict.
  bool informational = false;
  std::string detail;
};

struct SuiteResult {
  std::string suite;
  std::vector<PropertyCheck> checks;
  std::optional<std::string> skipped;

  bool passed() const;
};

struct Options {
  std::uint64_t seed = 1;
  std::optional<double> beta1_margin;
  double sv_tolerance = 1e-10;
};

/// |a - b| <= tol * max(|a|, |b|) + 1e-14, reported as the relative gap.
double relative_gap(double a, double b);
bool close_relative(double a, double b, double tol);

/// Runs one suite. Suites needing M = Q throw WrongRegime on other data.
SuiteResult run_suite(Suite suite, const ClassifiedDataset& ds, const Options& opts);

/// Runs every suite; square-only suites use `square` when given and are
/// reported as skipped otherwise (when `ds` is not square).
std::vector<SuiteResult> run_all(const ClassifiedDataset& ds, const std::optional<ClassifiedDataset>& square,
                                 const Options& opts);

}  // namespace shallow::verify
