#include "shallow/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "shallow/classify.hpp"
#include "shallow/constructive.hpp"
#include "shallow/cost.hpp"
#include "shallow/error.hpp"
#include "shallow/rng.hpp"
#include "shallow/truncation.hpp"

namespace shallow::verify {

namespace {

class Recorder {
 public:
  explicit Recorder(std::string suite) { result_.suite = std::move(suite); }

  // Passes when measured <= tolerance.
  void at_most(const std::string& name, double measured, double tolerance, std::string detail = {}) {
    result_.checks.push_back({result_.suite, name, measured <= tolerance, measured, tolerance, false,
                              std::move(detail)});
  }

  void info(const std::string& name, double measured, std::string detail = {}) {
    result_.checks.push_back({result_.suite, name, true, measured, 0.0, true, std::move(detail)});
  }

  SuiteResult finish() { return std::move(result_); }

 private:
  SuiteResult result_;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

void require_square(const ClassifiedDataset& ds, Suite s) {
  if (ds.m() != ds.q()) {
    throw Error(ErrorCode::WrongRegime, "suite '" + to_string(s) + "' requires M=Q (got M=" +
                                            std::to_string(ds.m()) + ", Q=" + std::to_string(ds.q()) + ")");
  }
}

ConstructiveConfig config(const Options& opts, Variant v) { return {opts.beta1_margin, v}; }

SuiteResult bounds_suite(const ClassifiedDataset& ds, const Options& opts) {
  Recorder rec("bounds");
  const PreparedDataset prep = prepare(ds, opts.sv_tolerance);
  const auto& st = prep.stats;
  const ShallowParams p = train_general(ds, st, prep.pack, config(opts, Variant::GeneralQleM));
  const double cost = cost_l2(p, ds);
  const auto bound = bound_general(ds, st, prep.pack);
  rec.at_most("cost_l2 <= bound_l2", cost - bound.bound_l2, 1e-10 * (1.0 + bound.bound_l2),
              "cost " + fmt(cost) + ", bound " + fmt(bound.bound_l2));
  rec.at_most("bound_l2 <= |Y|_op delta_P", bound.bound_l2 - bound.bound_deltap, 1e-10 * (1.0 + bound.bound_deltap),
              "bound_deltap " + fmt(bound.bound_deltap));

  // Hidden layer equals R P X0 + P_R B1 (complement rows are cut off).
  const double beta1 = config(opts, Variant::GeneralQleM).beta1(st.rho);
  Mat expected = prep.pack.r * (prep.pack.p * ds.x0());
  expected.colwise() += beta1 * prep.pack.range_indicator();
  expected.bottomRows(ds.m() - ds.q()).setZero();
  const Mat hidden = forward(p, ds.x0()).x1;
  rec.at_most("hidden layer = R P X0 + P_R B1", max_abs(hidden - expected), 1e-12 * std::max(1.0, beta1 + st.rho));

  double mean_gap = 0.0;
  for (int j = 0; j < ds.q(); ++j) {
    mean_gap = std::max(mean_gap, (output(p, st.means.col(j)) - ds.y().col(j)).cwiseAbs().maxCoeff());
  }
  rec.at_most("class means map to targets", mean_gap, 1e-9);

  ConstructiveConfig wide = config(opts, Variant::GeneralQleM);
  wide.beta1_margin = wide.beta1_margin.value_or(0.5 * st.rho) + 3.0 * st.rho + 1.0;
  const double cost_wide = cost_l2(train_general(ds, st, prep.pack, wide), ds);
  rec.at_most("cost unchanged by larger beta1", std::abs(cost_wide - cost), 1e-10);
  return rec.finish();
}

SuiteResult exact_min_suite(const ClassifiedDataset& ds, const Options& opts) {
  require_square(ds, Suite::ExactMin);
  Recorder rec("exact-min");
  const PreparedDataset prep = prepare(ds, opts.sv_tolerance);
  const auto& st = prep.stats;
  const ConstructiveConfig cfg = config(opts, Variant::ExactQeqQ);
  const ShallowParams p = train_exact_meq(ds, st, cfg);
  const double cost = cost_weighted(p, ds);
  const double closed = exact_min_weighted(ds, st);
  const double proj = projector_residual_norm(ds);
  rec.at_most("cost_weighted = closed form", relative_gap(cost, closed), 1e-9,
              "cost " + fmt(cost) + ", closed form " + fmt(closed));
  rec.at_most("closed form = |Y^ext P_perp|_N", relative_gap(closed, proj), 1e-9, "projector " + fmt(proj));

  const Mat hidden = forward(p, ds.x0()).x1;
  const double tied = solve_output_layer(hidden, p.b1, ds, BiasMode::Tied).cost_weighted;
  rec.at_most("tied-bias least squares = closed form", relative_gap(tied, closed), 1e-8, "lsq " + fmt(tied));
  const double first_order = first_order_estimate(ds, st);
  rec.at_most("closed form <= |Y delta1_rel|_N", closed - first_order, 1e-12 * (1.0 + first_order),
              "first order " + fmt(first_order));
  const double affine = solve_output_layer(hidden, p.b1, ds, BiasMode::Free).cost_weighted;
  rec.info("free-bias least squares over (W2,b2)", affine,
           "ratio to closed form " + fmt(closed > 0 ? affine / closed : 1.0));
  const double gap = op_norm(p.w2 - ds.y() * prep.pack.pen);
  rec.info("|W2* - W2~|_op", gap, "delta_P " + fmt(st.delta_p));
  return rec.finish();
}

SuiteResult degeneracy_suite(const ClassifiedDataset& ds, const Options& opts) {
  require_square(ds, Suite::Degeneracy);
  Recorder rec("degeneracy");
  const PreparedDataset prep = prepare(ds, opts.sv_tolerance);
  const auto& st = prep.stats;
  const ConstructiveConfig cfg = config(opts, Variant::ExactQeqQ);
  const ShallowParams p = train_exact_meq(ds, st, cfg);
  const double target = exact_min_weighted(ds, st);
  const double eps = 1e-3 * (cfg.beta1(st.rho) - 2.0 * st.rho + st.delta);
  Rng rng(opts.seed ^ 0x9e3779b97f4a7c15ULL);
  double worst = 0.0;
  int outside = 0;
  const int q = ds.q();
  for (int trial = 0; trial < 50; ++trial) {
    Mat g = gaussian_matrix(q, q, 1.0, rng);
    g *= 0.99 * eps / op_norm(g);
    Vec bt = gaussian_matrix(q, 1, 1.0, rng).col(0);
    bt *= 0.99 * eps / std::max(bt.norm(), 1e-300);
    const Mat w1 = p.w1 * (Mat::Identity(q, q) + g);
    const Vec b1 = p.b1 + bt;
    Mat pre = w1 * ds.x0();
    pre.colwise() += b1;
    if (pre.minCoeff() < 0.0) {
      ++outside;
      continue;
    }
    const double refit = resolve_output_layer_normal_equations(relu(pre), b1, ds).cost_weighted;
    worst = std::max(worst, relative_gap(refit, target));
  }
  rec.at_most("perturbations leaving the region", outside, 0);
  rec.at_most("refit cost = exact minimum (50 perturbations)", worst, 1e-8, "epsilon " + fmt(eps));
  return rec.finish();
}

SuiteResult invariance_suite(const ClassifiedDataset& ds, const Options& opts) {
  Recorder rec("invariance");
  const PreparedDataset prep = prepare(ds, opts.sv_tolerance);
  const auto base_bound = bound_general(ds, prep.stats, prep.pack).bound_l2;
  for (double lambda : {0.1, 10.0}) {
    const ClassifiedDataset scaled = ds.with_inputs(lambda * ds.x0());
    const PreparedDataset sp = prepare(scaled, opts.sv_tolerance);
    const std::string tag = " (lambda=" + fmt(lambda) + ")";
    rec.at_most("delta_P scale invariant" + tag, relative_gap(sp.stats.delta_p, prep.stats.delta_p), 1e-9);
    rec.at_most("bound_l2 scale invariant" + tag,
                relative_gap(bound_general(scaled, sp.stats, sp.pack).bound_l2, base_bound), 1e-9);
  }
  if (ds.m() != ds.q()) {
    rec.info("GL(Q) reparametrization checks skipped (M != Q)", 0.0);
    return rec.finish();
  }
  const auto rel = relative_deviations(ds, prep.stats);
  const double emin = exact_min_weighted(ds, prep.stats);
  const bool small = ds.n() <= kMaxMaterializedProjector;
  const Mat proj = small ? data_projector(ds).p_script : Mat();
  Rng rng(opts.seed ^ 0x5bd1e995ULL);
  double worst_proj = 0.0, worst_d1 = 0.0, worst_min = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Mat k = random_invertible(ds.q(), 100.0, rng);
    const ClassifiedDataset moved = ds.transformed(k);
    const PreparedDataset mp = prepare(moved, opts.sv_tolerance);
    if (small) {
      worst_proj = std::max(worst_proj, max_abs(data_projector(moved).p_script - proj) / std::max(1.0, max_abs(proj)));
    }
    worst_d1 = std::max(worst_d1, max_abs(relative_deviations(moved, mp.stats).delta1_rel - rel.delta1_rel) /
                                      std::max(1e-300, max_abs(rel.delta1_rel)));
    worst_min = std::max(worst_min, relative_gap(exact_min_weighted(moved, mp.stats), emin));
  }
  if (small) rec.at_most("data projector GL(Q) invariant", worst_proj, 1e-7);
  if (max_abs(rel.delta1_rel) > 0) rec.at_most("delta1_rel GL(Q) invariant", worst_d1, 1e-7);
  rec.at_most("exact minimum GL(Q) invariant", worst_min, 1e-7);
  return rec.finish();
}

SuiteResult metric_suite(const ClassifiedDataset& ds, const Options& opts) {
  Recorder rec("metric");
  const PreparedDataset prep = prepare(ds, opts.sv_tolerance);
  const ShallowParams p = train_general(ds, prep.stats, prep.pack, config(opts, Variant::GeneralQleM));
  const MetricGeometry geo = make_geometry(ds, prep.pack);
  Rng rng(opts.seed ^ 0x2545f4914f6cdd1dULL);
  const int m = ds.m();
  // Test inputs with |x| <= 2ρ keep the range block positive.
  const double half_width = 2.0 * std::max(prep.stats.rho, 1e-12) / std::sqrt(static_cast<double>(m));
  int disagreements = 0;
  double worst = 0.0, worst_perp = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const Vec x = uniform_matrix(m, 1, -half_width, half_width, rng).col(0);
    const auto out = classify(p, geo, ds, x);
    if (!out.agreement.value_or(false)) ++disagreements;
    for (int j = 0; j < ds.q(); ++j) {
      const double s = out.scores[static_cast<std::size_t>(j)];
      worst = std::max(worst, std::abs(s - out.metric_scores[static_cast<std::size_t>(j)]) / (1.0 + s));
    }
    if (m > ds.q()) {
      const Vec v = prep.pack.p_perp * uniform_matrix(m, 1, -5.0 * half_width, 5.0 * half_width, rng).col(0);
      const auto shifted = score(p, x + v, ds);
      for (int j = 0; j < ds.q(); ++j) {
        worst_perp = std::max(worst_perp, std::abs(shifted[static_cast<std::size_t>(j)] -
                                                   out.scores[static_cast<std::size_t>(j)]));
      }
    }
  }
  rec.at_most("network scores = metric scores (1000 inputs)", worst, 1e-9,
              std::to_string(disagreements) + " disagreements");
  if (m > ds.q()) rec.at_most("scores unchanged by range(P_perp) shifts", worst_perp, 1e-10);

  double sym = 0.0, tri = 0.0, self = 0.0, min_sep = INFINITY;
  for (int t = 0; t < 100; ++t) {
    const Vec a = geo.p * uniform_matrix(m, 1, -1.0, 1.0, rng).col(0);
    const Vec b = geo.p * uniform_matrix(m, 1, -1.0, 1.0, rng).col(0);
    const Vec c = geo.p * uniform_matrix(m, 1, -1.0, 1.0, rng).col(0);
    const double ab = metric(geo.w2_tilde, geo.p, a, b);
    sym = std::max(sym, std::abs(ab - metric(geo.w2_tilde, geo.p, b, a)));
    tri = std::max(tri, ab - metric(geo.w2_tilde, geo.p, a, c) - metric(geo.w2_tilde, geo.p, c, b));
    self = std::max(self, metric(geo.w2_tilde, geo.p, a, a));
    min_sep = std::min(min_sep, ab / std::max((a - b).norm(), 1e-300));
  }
  rec.at_most("metric symmetric", sym, 1e-12);
  rec.at_most("triangle inequality", tri, 1e-12);
  rec.at_most("d(x, x) = 0", self, 0.0);
  rec.at_most("d(x, y) > 0 for x != y in range(P)", -min_sep, -1e-12, "min d/|x-y| " + fmt(min_sep));
  return rec.finish();
}

SuiteResult truncation_suite(const ClassifiedDataset& ds, const Options& opts) {
  require_square(ds, Suite::Truncation);
  Recorder rec("truncation");
  const PreparedDataset prep = prepare(ds, opts.sv_tolerance);
  const double rho = prep.stats.rho;
  const double emin = exact_min_weighted(ds, prep.stats);
  const int q = ds.q();
  std::vector<FirstLayer> grid;
  for (int k = 0; k <= 4; ++k) grid.push_back({Mat::Identity(q, q), Vec::Constant(q, (2.0 + 0.5 * k) * rho)});
  Rng rng(opts.seed ^ 0x7f4a7c159e3779b9ULL);
  for (int k = 0; k < 5; ++k) {
    grid.push_back({random_orthogonal(q, rng), Vec::Constant(q, 0.25 * k * rho)});
  }
  for (int k = 0; k < 5; ++k) {
    grid.push_back({Mat::Identity(q, q), uniform_matrix(q, 1, -0.5 * rho, 0.5 * rho, rng).col(0)});
  }
  const auto results = sweep_fixed_point_region(ds, grid);
  double fp = 0.0, reapply = 0.0, closed_vs_proj = 0.0, closed_vs_lsq = 0.0, region_spread = 0.0;
  int evaluated = 0, in_region = 0;
  double affine_ratio = 1.0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    if (r.error) continue;
    Mat pre = grid[i].w1 * r.tau_x0;
    pre.colwise() += grid[i].b1;
    reapply = std::max(reapply, max_abs(relu(pre) - pre) / std::max(1.0, max_abs(pre)));
    if (r.in_fixed_point_region) {
      ++in_region;
      fp = std::max(fp, r.fixed_point_defect / std::max(1.0, rho));
    }
    if (r.min_cost_weighted) {
      ++evaluated;
      closed_vs_proj = std::max(closed_vs_proj, relative_gap(*r.min_cost_weighted, *r.projector_residual_tr));
      closed_vs_lsq = std::max(closed_vs_lsq, relative_gap(*r.min_cost_weighted, *r.tied_lsq_min));
      if (r.in_fixed_point_region) region_spread = std::max(region_spread, relative_gap(*r.min_cost_weighted, emin));
      if (*r.min_cost_weighted > 0) affine_ratio = std::min(affine_ratio, *r.affine_lsq_min / *r.min_cost_weighted);
    }
  }
  rec.at_most("fixed points: tau(X0) = X0", fp, 1e-12, std::to_string(in_region) + " region points");
  rec.at_most("re-application identity", reapply, 1e-10);
  rec.at_most("closed form = |Y^ext P_perp(tau)|_N", closed_vs_proj, 1e-8,
              std::to_string(evaluated) + " rank-preserving points");
  rec.at_most("closed form = tied-bias least squares", closed_vs_lsq, 1e-8);
  rec.at_most("region minima = exact minimum", region_spread, 1e-8);
  rec.info("min ratio free-bias lsq / closed form", affine_ratio);
  return rec.finish();
}

}  // namespace

Suite suite_from_string(const std::string& s) {
  if (s == "bounds") return Suite::Bounds;
  if (s == "exact-min") return Suite::ExactMin;
  if (s == "degeneracy") return Suite::Degeneracy;
  if (s == "invariance") return Suite::Invariance;
  if (s == "metric") return Suite::Metric;
  if (s == "truncation") return Suite::Truncation;
  if (s == "all") return Suite::All;
  throw Error(ErrorCode::InvalidInput, "unknown suite '" + s + "'");
}

std::string to_string(Suite s) {
  switch (s) {
    case Suite::Bounds: return "bounds";
    case Suite::ExactMin: return "exact-min";
    case Suite::Degeneracy: return "degeneracy";
    case Suite::Invariance: return "invariance";
    case Suite::Metric: return "metric";
    case Suite::Truncation: return "truncation";
    case Suite::All: return "all";
  }
  return "?";
}

bool requires_square(Suite s) {
  return s == Suite::ExactMin || s == Suite::Degeneracy || s == Suite::Truncation;
}

bool SuiteResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const PropertyCheck& c) { return c.pass; });
}

double relative_gap(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  const double diff = std::abs(a - b);
  if (diff <= 1e-14) return 0.0;
  return diff / scale;
}

bool close_relative(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b)) + 1e-14;
}

SuiteResult run_suite(Suite suite, const ClassifiedDataset& ds, const Options& opts) {
  switch (suite) {
    case Suite::Bounds: return bounds_suite(ds, opts);
    case Suite::ExactMin: return exact_min_suite(ds, opts);
    case Suite::Degeneracy: return degeneracy_suite(ds, opts);
    case Suite::Invariance: return invariance_suite(ds, opts);
    case Suite::Metric: return metric_suite(ds, opts);
    case Suite::Truncation: return truncation_suite(ds, opts);
    case Suite::All: break;
  }
  throw Error(ErrorCode::InvalidInput, "use run_all for the 'all' suite");
}

std::vector<SuiteResult> run_all(const ClassifiedDataset& ds, const std::optional<ClassifiedDataset>& square,
                                 const Options& opts) {
  std::vector<SuiteResult> out;
  for (Suite s : {Suite::Bounds, Suite::ExactMin, Suite::Degeneracy, Suite::Invariance, Suite::Metric,
                  Suite::Truncation}) {
    if (requires_square(s) && ds.m() != ds.q()) {
      if (square) {
        out.push_back(run_suite(s, *square, opts));
      } else {
        SuiteResult skipped;
        skipped.suite = to_string(s);
        skipped.skipped = "requires M=Q";
        out.push_back(std::move(skipped));
      }
      continue;
    }
    out.push_back(run_suite(s, ds, opts));
  }
  return out;
}

}  // namespace shallow::verify
