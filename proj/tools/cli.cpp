#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "shallow/classify.hpp"
#include "shallow/constructive.hpp"
#include "shallow/cost.hpp"
#include "shallow/error.hpp"
#include "shallow/gd_baseline.hpp"
#include "shallow/io.hpp"
#include "shallow/truncation.hpp"
#include "shallow/verify.hpp"

namespace shallow::cli {

namespace {

using io::json;

struct DataOptions {
  std::string data;
  bool csv_header = false;
  int m = 3;
  int q = 2;
  std::string sizes = "20";
  double noise = 0.05;
  double mean_scale = 1.0;
  std::uint64_t seed = 1;
};

struct CommonOptions {
  std::optional<double> beta1_margin;
  double sv_tol = kDefaultSvTolerance;
  std::string out;
  std::string format = "json";
};

struct GdOptions {
  GdConfig cfg;
  std::string trace;
  bool warm_start = false;
};

void add_data_options(CLI::App& sub, DataOptions& d) {
  sub.add_option("--data", d.data, "Dataset file (.json, or .csv with features then 0-based label)");
  sub.add_flag("--csv-header", d.csv_header, "CSV inputs start with a header row");
  sub.add_option("--m", d.m, "Input dimension for synthetic data")->capture_default_str();
  sub.add_option("--q", d.q, "Class count for synthetic data")->capture_default_str();
  sub.add_option("--sizes", d.sizes, "Samples per class: one value or a comma list")->capture_default_str();
  sub.add_option("--noise", d.noise, "Half-width of the uniform box noise")->capture_default_str();
  sub.add_option("--mean-scale", d.mean_scale, "Class means are uniform in [-s, s]^M")->capture_default_str();
  sub.add_option("--seed", d.seed, "Seed for the mt19937_64 generator")->capture_default_str();
}

void add_common_options(CLI::App& sub, CommonOptions& c) {
  sub.add_option("--beta1-margin", c.beta1_margin, "Slack added to 2*rho for beta1 (default 0.5*rho)");
  sub.add_option("--sv-tol", c.sv_tol, "Relative singular value cutoff")->capture_default_str();
  sub.add_option("--out", c.out, "Output path (default: stdout)");
  sub.add_option("--format", c.format, "Output format")
      ->check(CLI::IsMember({"json", "csv", "table"}))
      ->capture_default_str();
}

std::vector<int> parse_sizes(const std::string& text, int q) {
  std::vector<int> sizes;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      sizes.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidInput, "bad --sizes entry '" + item + "'");
    }
  }
  if (sizes.size() == 1) sizes.assign(static_cast<std::size_t>(q), sizes[0]);
  if (static_cast<int>(sizes.size()) != q) throw Error(ErrorCode::InvalidInput, "--sizes needs 1 or q entries");
  return sizes;
}

ClassifiedDataset load_dataset(const DataOptions& d) {
  if (!d.data.empty()) return io::read_dataset(d.data, d.csv_header);
  return synthesize(d.m, d.q, parse_sizes(d.sizes, d.q), d.mean_scale, d.noise, d.seed);
}

// Writes to --out when given, otherwise to `fallback`.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw Error(ErrorCode::InvalidInput, "cannot write " + path);
    }
    stream_ = file_ ? file_.get() : &fallback;
  }
  std::ostream& get() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

std::string opt_num(const json& j, const char* key) {
  return j.contains(key) && j[key].is_number() ? num(j[key].get<double>()) : "-";
}

void print_key_values(std::ostream& out, const json& j) {
  for (const auto& [key, value] : j.items()) {
    if (value.is_array() || value.is_object()) continue;
    out << std::left << std::setw(24) << key << " " << (value.is_number() ? num(value.get<double>()) : value.dump())
        << "\n";
  }
}

void emit(std::ostream& out, const json& j, const std::string& format) {
  if (format == "table") {
    print_key_values(out, j);
  } else {
    out << j.dump(2) << "\n";
  }
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput:
    case ErrorCode::DimensionError:
    case ErrorCode::WrongRegime:
    case ErrorCode::MissingArtifact:
      return kUsageError;
    default:
      return kNumericError;
  }
}

// ---------------------------------------------------------------- commands

int cmd_gen(const DataOptions& d, const CommonOptions& c, std::ostream& out) {
  const ClassifiedDataset ds = load_dataset(d);
  Sink sink(c.out, out);
  if (c.format == "csv") {
    io::write_csv(sink.get(), ds, true);
  } else {
    sink.get() << io::to_json(ds).dump(2) << "\n";
  }
  return kOk;
}

int cmd_train(const DataOptions& d, const CommonOptions& c, const std::string& variant, std::ostream& out) {
  const ClassifiedDataset ds = load_dataset(d);
  const PreparedDataset prep = prepare(ds, c.sv_tol);
  const TrainedNetwork trained = train(ds, prep, {c.beta1_margin, io::variant_from_string(variant)});
  Sink sink(c.out, out);
  const json artifact = io::train_artifact(trained);
  if (c.format == "table") {
    print_key_values(sink.get(), artifact["provenance"]);
  } else {
    sink.get() << artifact.dump(2) << "\n";
  }
  return kOk;
}

ShallowParams params_or_train(const std::string& params_path, const ClassifiedDataset& ds,
                              const PreparedDataset& prep, const CommonOptions& c) {
  if (!params_path.empty()) return io::params_from_json(io::read_json_file(params_path));
  return train_general(ds, prep.stats, prep.pack, {c.beta1_margin, Variant::GeneralQleM});
}

int cmd_eval(const DataOptions& d, const CommonOptions& c, const std::string& params_path, bool matrices,
             std::ostream& out) {
  const ClassifiedDataset ds = load_dataset(d);
  const PreparedDataset prep = prepare(ds, c.sv_tol);
  const ShallowParams p = params_or_train(params_path, ds, prep, c);
  const CostReport report = evaluate(p, ds, prep, matrices);
  Sink sink(c.out, out);
  emit(sink.get(), io::to_json(report), c.format);
  return kOk;
}

int cmd_classify(const DataOptions& d, const CommonOptions& c, const std::string& params_path,
                 const std::string& inputs_path, bool inputs_header, std::ostream& out) {
  const ClassifiedDataset ds = load_dataset(d);
  const PreparedDataset prep = prepare(ds, c.sv_tol);
  const ShallowParams p = params_or_train(params_path, ds, prep, c);
  Mat xs;
  if (inputs_path.empty()) {
    xs = ds.x0();
  } else {
    std::ifstream in(inputs_path);
    if (!in) throw Error(ErrorCode::MissingArtifact, "cannot open " + inputs_path);
    xs = io::inputs_from_csv(in, ds.m(), inputs_header);
  }
  const auto outcomes = classify_batch(p, std::nullopt, ds, xs);
  Sink sink(c.out, out);
  auto& os = sink.get();
  os << "index,winner";
  for (int j = 0; j < ds.q(); ++j) os << ",score_" << j;
  os << "\n" << std::setprecision(17);
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    os << k << "," << outcomes[k].winner;
    for (double s : outcomes[k].scores) os << "," << s;
    os << "\n";
  }
  return kOk;
}

int cmd_truncation_sweep(const DataOptions& d, const CommonOptions& c, const std::string& grid_path,
                         bool matrices, std::ostream& out) {
  const ClassifiedDataset ds = load_dataset(d);
  const PreparedDataset prep = prepare(ds, c.sv_tol);
  std::vector<FirstLayer> grid;
  if (grid_path.empty()) {
    // Default grid: W1 = 1, b1 = t u for t from 0 to 4 rho.
    for (int k = 0; k <= 8; ++k) {
      grid.push_back({Mat::Identity(ds.m(), ds.m()), Vec::Constant(ds.m(), 0.5 * k * prep.stats.rho)});
    }
  } else {
    grid = io::grid_from_json(io::read_json_file(grid_path));
  }
  const auto results = sweep_fixed_point_region(ds, grid);
  const double emin = exact_min_weighted(ds, prep.stats);
  Sink sink(c.out, out);
  for (std::size_t i = 0; i < results.size(); ++i) {
    json line = io::to_json(results[i], matrices);
    line["index"] = i;
    line["degenerate_min_weighted"] = emin;
    sink.get() << line.dump() << "\n";
  }
  return kOk;
}

void print_suite(std::ostream& out, const verify::SuiteResult& s) {
  if (s.skipped) {
    out << "SKIP  " << std::left << std::setw(12) << s.suite << " " << *s.skipped << "\n";
    return;
  }
  for (const auto& ch : s.checks) {
    const char* tag = ch.informational ? "INFO" : (ch.pass ? "PASS" : "FAIL");
    out << tag << "  " << std::left << std::setw(12) << s.suite << " " << std::setw(48) << ch.name
        << " measured=" << num(ch.measured);
    if (!ch.informational) out << " tol=" << num(ch.tolerance);
    if (!ch.detail.empty()) out << "  (" << ch.detail << ")";
    out << "\n";
  }
}

int cmd_verify(const std::string& suite_name, DataOptions d, const CommonOptions& c, std::ostream& out,
               std::ostream& err) {
  const verify::Suite suite = verify::suite_from_string(suite_name);
  const verify::Options opts{d.seed, c.beta1_margin, c.sv_tol};
  std::vector<verify::SuiteResult> results;
  if (suite == verify::Suite::All) {
    const ClassifiedDataset ds = load_dataset(d);
    std::optional<ClassifiedDataset> square;
    if (d.data.empty() && ds.m() != ds.q()) {
      DataOptions sq = d;
      sq.m = sq.q;
      square = load_dataset(sq);
    }
    results = verify::run_all(ds, square, opts);
  } else {
    const ClassifiedDataset ds = load_dataset(d);
    if (verify::requires_square(suite) && ds.m() != ds.q()) {
      err << "error: suite " << suite_name << " requires M=Q (got M=" << ds.m() << ", Q=" << ds.q() << ")\n";
      return kUsageError;
    }
    results.push_back(verify::run_suite(suite, ds, opts));
  }
  Sink sink(c.out, out);
  auto& os = sink.get();
  std::optional<std::string> first_failure;
  int passed = 0, failed = 0;
  for (const auto& r : results) {
    print_suite(os, r);
    for (const auto& ch : r.checks) {
      if (ch.informational) continue;
      if (ch.pass) {
        ++passed;
      } else {
        ++failed;
        if (!first_failure) first_failure = ch.suite + ": " + ch.name;
      }
    }
  }
  os << "\nsuite        result\n";
  for (const auto& r : results) {
    os << std::left << std::setw(12) << r.suite << " " << (r.skipped ? "skipped" : (r.passed() ? "pass" : "FAIL"))
       << "\n";
  }
  os << "checks: " << passed << " passed, " << failed << " failed\n";
  if (first_failure) {
    os << "first failure: " << *first_failure << "\n";
    return kVerificationFailed;
  }
  return kOk;
}

int cmd_compare(const DataOptions& d, const CommonOptions& c, const GdOptions& g, std::ostream& out) {
  const ClassifiedDataset ds = load_dataset(d);
  const PreparedDataset prep = prepare(ds, c.sv_tol);
  const Variant variant = ds.m() == ds.q() ? Variant::ExactQeqQ : Variant::GeneralQleM;
  const TrainedNetwork constructive = train(ds, prep, {c.beta1_margin, variant});
  const std::optional<ShallowParams> init =
      g.warm_start ? std::optional<ShallowParams>(constructive.params) : std::nullopt;
  const GdResult gd = train_gd(ds, g.cfg, init);
  if (!g.trace.empty()) {
    std::ofstream trace(g.trace);
    if (!trace) throw Error(ErrorCode::InvalidInput, "cannot write " + g.trace);
    io::write_trace_csv(trace, gd.trace);
  }
  const CompareReport report = compare(ds, gd.params, constructive.params);
  Sink sink(c.out, out);
  json j = io::to_json(report);
  j["constructive_variant"] = io::to_string(variant);
  j["gd_warm_start"] = g.warm_start;
  if (c.format == "table") {
    auto& os = sink.get();
    os << std::left << std::setw(14) << "trainer" << std::setw(20) << "cost_l2" << "cost_weighted\n";
    os << std::setw(14) << "gd" << std::setw(20) << num(report.gd.cost_l2) << num(report.gd.cost_weighted) << "\n";
    os << std::setw(14) << "constructive" << std::setw(20) << num(report.constructive.cost_l2)
       << num(report.constructive.cost_weighted) << "\n";
    os << "bound_general " << num(report.bound_general) << "\n";
    if (report.exact_min_weighted) os << "exact_min_weighted " << num(*report.exact_min_weighted) << "\n";
  } else {
    sink.get() << j.dump(2) << "\n";
  }
  return kOk;
}

std::vector<json> read_artifacts(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingArtifact, "cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  std::vector<json> out;
  try {
    out.push_back(json::parse(text));
    return out;
  } catch (const json::parse_error&) {
  }
  std::stringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::InvalidInput, path + ": " + e.what());
    }
  }
  return out;
}

json report_row(const std::string& source, const json& a) {
  const std::string kind = a.value("kind", "unknown");
  json row{{"source", source}, {"kind", kind}};
  auto copy = [&](const json& from, std::initializer_list<const char*> keys) {
    for (const char* k : keys)
      if (from.contains(k)) row[k] = from[k];
  };
  if (kind == "train") {
    copy(a.at("provenance"), {"variant", "beta1", "delta", "delta_p", "rho", "bound_l2", "bound_deltap",
                              "exact_min_weighted"});
  } else if (kind == "eval") {
    copy(a, {"cost_l2", "cost_weighted", "bound_general", "bound_deltap", "exact_min_weighted", "delta", "delta_p",
             "rho"});
  } else if (kind == "truncation") {
    copy(a, {"index", "in_fixed_point_region", "rank_x0_preserved", "rank_means_preserved", "min_cost_weighted",
             "delta_p_tr", "degenerate_min_weighted", "error"});
  } else if (kind == "compare") {
    row["cost_l2"] = a.at("gd").at("cost_l2");
    row["cost_weighted"] = a.at("gd").at("cost_weighted");
    copy(a, {"bound_general", "bound_deltap", "exact_min_weighted", "gd_in_fixed_point_region"});
  }
  return row;
}

int cmd_report(const std::vector<std::string>& paths, const CommonOptions& c, std::ostream& out) {
  json rows = json::array();
  for (const auto& path : paths) {
    for (const auto& artifact : read_artifacts(path)) rows.push_back(report_row(path, artifact));
  }
  Sink sink(c.out, out);
  auto& os = sink.get();
  if (c.format == "json") {
    os << json{{"rows", rows}}.dump(2) << "\n";
    return kOk;
  }
  os << std::left << std::setw(12) << "kind" << std::setw(8) << "index" << std::setw(14) << "delta" << std::setw(14)
     << "delta_p" << std::setw(14) << "rho" << std::setw(14) << "beta1" << std::setw(14) << "bound" << std::setw(14)
     << "bound_deltap" << std::setw(14) << "cost_l2" << std::setw(14) << "cost_w" << std::setw(14) << "min_w"
     << "region\n";
  for (const auto& r : rows) {
    const std::string region =
        r.contains("in_fixed_point_region") ? (r["in_fixed_point_region"].get<bool>() ? "in" : "out")
        : r.contains("gd_in_fixed_point_region") ? (r["gd_in_fixed_point_region"].get<bool>() ? "in" : "out")
                                                 : "-";
    const std::string bound = r.contains("bound_l2") ? opt_num(r, "bound_l2") : opt_num(r, "bound_general");
    const std::string minw = r.contains("min_cost_weighted") ? opt_num(r, "min_cost_weighted")
                                                             : opt_num(r, "exact_min_weighted");
    os << std::setw(12) << r["kind"].get<std::string>() << std::setw(8)
       << (r.contains("index") ? std::to_string(r["index"].get<int>()) : "-") << std::setw(14) << opt_num(r, "delta")
       << std::setw(14) << opt_num(r, "delta_p") << std::setw(14) << opt_num(r, "rho") << std::setw(14)
       << opt_num(r, "beta1") << std::setw(14) << bound << std::setw(14) << opt_num(r, "bound_deltap")
       << std::setw(14) << opt_num(r, "cost_l2") << std::setw(14) << opt_num(r, "cost_weighted") << std::setw(14)
       << minw << region << "\n";
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Constructive training and verification for shallow ReLU classifiers", "shallow"};
  app.require_subcommand(1);

  DataOptions data;
  CommonOptions common;
  GdOptions gd;
  std::string variant = "general";
  std::string params_path;
  std::string inputs_path;
  bool inputs_header = false;
  bool matrices = false;
  std::string grid_path;
  std::string suite = "all";
  std::vector<std::string> artifacts;

  auto* gen = app.add_subcommand("gen", "Generate or convert a dataset");
  auto* train_cmd = app.add_subcommand("train", "Build constructive parameters");
  auto* eval = app.add_subcommand("eval", "Evaluate costs, bounds and the exact minimum");
  auto* classify_cmd = app.add_subcommand("classify", "Classify CSV inputs with a trained network");
  auto* sweep = app.add_subcommand("truncation-sweep", "Output-layer minima over a first-layer grid");
  auto* verify_cmd = app.add_subcommand("verify", "Run a property verification suite");
  auto* compare_cmd = app.add_subcommand("compare", "Gradient descent baseline vs constructive parameters");
  auto* report = app.add_subcommand("report", "Merge artifacts into one report");

  for (auto* sub : {gen, train_cmd, eval, classify_cmd, sweep, verify_cmd, compare_cmd}) {
    add_data_options(*sub, data);
    add_common_options(*sub, common);
  }
  add_common_options(*report, common);

  train_cmd->add_option("--variant", variant, "general (Q <= M) or exact (M = Q)")
      ->check(CLI::IsMember({"general", "exact"}))
      ->capture_default_str();
  eval->add_option("--params", params_path, "Params or train artifact JSON (default: train general)");
  eval->add_flag("--matrices", matrices, "Include relative deviation matrices");
  classify_cmd->add_option("--params", params_path, "Params or train artifact JSON (default: train general)");
  classify_cmd->add_option("--inputs", inputs_path, "CSV of inputs, M columns per row (default: training data)");
  classify_cmd->add_flag("--inputs-header", inputs_header, "Inputs CSV starts with a header row");
  sweep->add_option("--grid", grid_path, "JSON list of {\"w1\": [[...]], \"b1\": [...]}");
  sweep->add_flag("--matrices", matrices, "Include truncated inputs and deviation matrices");
  verify_cmd->add_option("suite", suite, "bounds|exact-min|degeneracy|invariance|metric|truncation|all")
      ->check(CLI::IsMember({"bounds", "exact-min", "degeneracy", "invariance", "metric", "truncation", "all"}))
      ->capture_default_str();
  compare_cmd->add_option("--lr", gd.cfg.learning_rate, "Learning rate")->capture_default_str();
  compare_cmd->add_option("--steps", gd.cfg.steps, "Gradient steps")->capture_default_str();
  compare_cmd->add_option("--init-scale", gd.cfg.init_scale, "Initialization scale")->capture_default_str();
  compare_cmd->add_option("--record-every", gd.cfg.record_every, "Trace stride")->capture_default_str();
  compare_cmd->add_option("--gd-seed", gd.cfg.seed, "Seed for the initial parameters")->capture_default_str();
  compare_cmd->add_option("--trace", gd.trace, "Write the cost trace as CSV (step,cost)");
  compare_cmd->add_flag("--warm-start", gd.warm_start, "Start gradient descent from the constructive parameters");
  report->add_option("artifacts", artifacts, "Artifact files (JSON or JSON lines)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (*gen) return cmd_gen(data, common, out);
    if (*train_cmd) return cmd_train(data, common, variant, out);
    if (*eval) return cmd_eval(data, common, params_path, matrices, out);
    if (*classify_cmd) return cmd_classify(data, common, params_path, inputs_path, inputs_header, out);
    if (*sweep) return cmd_truncation_sweep(data, common, grid_path, matrices, out);
    if (*verify_cmd) return cmd_verify(suite, data, common, out, err);
    if (*compare_cmd) return cmd_compare(data, common, gd, out);
    if (*report) return cmd_report(artifacts, common, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  }
  return kUsageError;
}

}  // namespace shallow::cli
