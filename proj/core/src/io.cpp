#include "shallow/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "shallow/error.hpp"

namespace shallow::io {

namespace {

template <class T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = to_json(*v);
}

void put_optional(json& j, const char* key, const std::optional<double>& v) {
  if (v) j[key] = *v;
}

std::vector<double> parse_row(const std::string& line) {
  std::vector<double> values;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(cell, &used));
      if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidInput, "cannot parse CSV cell '" + cell + "'");
    }
  }
  return values;
}

bool blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

}  // namespace

json to_json(const Mat& a) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < a.cols(); ++k) row.push_back(a(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const Vec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Mat matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw Error(ErrorCode::InvalidInput, "expected a matrix");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Mat a(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw Error(ErrorCode::InvalidInput, "ragged matrix");
    }
    for (Eigen::Index k = 0; k < cols; ++k) a(i, k) = row[static_cast<std::size_t>(k)].get<double>();
  }
  return a;
}

Vec vector_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorCode::InvalidInput, "expected a vector");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

json to_json(const ShallowParams& p) {
  return {{"w1", to_json(p.w1)}, {"b1", to_json(p.b1)}, {"w2", to_json(p.w2)}, {"b2", to_json(p.b2)}};
}

ShallowParams params_from_json(const json& j) {
  try {
    const json& src = j.contains("params") ? j.at("params") : j;
    ShallowParams p{matrix_from_json(src.at("w1")), vector_from_json(src.at("b1")), matrix_from_json(src.at("w2")),
                    vector_from_json(src.at("b2"))};
    p.validate();
    return p;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("bad params JSON: ") + e.what());
  }
}

std::string to_string(Variant v) { return v == Variant::ExactQeqQ ? "exact" : "general"; }

Variant variant_from_string(const std::string& s) {
  if (s == "general") return Variant::GeneralQleM;
  if (s == "exact") return Variant::ExactQeqQ;
  throw Error(ErrorCode::InvalidInput, "unknown variant '" + s + "'");
}

json to_json(const Provenance& p) {
  json j{{"variant", to_string(p.variant)}, {"beta1", p.beta1},       {"delta", p.delta},
         {"delta_p", p.delta_p},           {"rho", p.rho},           {"bound_l2", p.bound_l2},
         {"bound_deltap", p.bound_deltap}};
  put_optional(j, "exact_min_weighted", p.exact_min_weighted);
  return j;
}

json train_artifact(const TrainedNetwork& t) {
  return {{"kind", "train"}, {"params", to_json(t.params)}, {"provenance", to_json(t.provenance)}};
}

json to_json(const ClassifiedDataset& ds) {
  json classes = json::array();
  for (int j = 0; j < ds.q(); ++j) {
    json cls = json::array();
    for (int i = 0; i < ds.class_size(j); ++i) cls.push_back(to_json(Vec(ds.x0().col(ds.offset(j) + i))));
    classes.push_back(std::move(cls));
  }
  return {{"m", ds.m()}, {"q", ds.q()}, {"classes", std::move(classes)}, {"y", to_json(ds.y())}};
}

ClassifiedDataset dataset_from_json(const json& j) {
  try {
    const int m = j.at("m").get<int>();
    const int q = j.at("q").get<int>();
    const json& classes = j.at("classes");
    if (!classes.is_array() || static_cast<int>(classes.size()) != q) {
      throw Error(ErrorCode::InvalidInput, "\"classes\" must hold q arrays");
    }
    std::vector<int> sizes;
    std::vector<Vec> cols;
    for (const auto& cls : classes) {
      sizes.push_back(static_cast<int>(cls.size()));
      for (const auto& x : cls) {
        Vec v = vector_from_json(x);
        if (v.size() != m) throw Error(ErrorCode::DimensionError, "sample length != m");
        cols.push_back(std::move(v));
      }
    }
    Mat x0(m, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) x0.col(static_cast<Eigen::Index>(c)) = cols[c];
    if (j.contains("y")) return ClassifiedDataset(std::move(x0), std::move(sizes), matrix_from_json(j.at("y")));
    return ClassifiedDataset(std::move(x0), std::move(sizes));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("bad dataset JSON: ") + e.what());
  }
}

ClassifiedDataset dataset_from_csv(std::istream& in, bool has_header) {
  std::string line;
  if (has_header) std::getline(in, line);
  std::map<int, std::vector<Vec>> by_class;
  Eigen::Index m = -1;
  while (std::getline(in, line)) {
    if (blank(line)) continue;
    const auto row = parse_row(line);
    if (row.size() < 2) throw Error(ErrorCode::InvalidInput, "CSV row needs features and a label");
    const auto features = static_cast<Eigen::Index>(row.size() - 1);
    if (m < 0) m = features;
    if (features != m) throw Error(ErrorCode::DimensionError, "CSV rows have different widths");
    const double label = row.back();
    if (label < 0 || label != std::floor(label)) throw Error(ErrorCode::InvalidInput, "labels must be integers >= 0");
    by_class[static_cast<int>(label)].push_back(Eigen::Map<const Vec>(row.data(), features));
  }
  if (by_class.empty()) throw Error(ErrorCode::InvalidInput, "CSV holds no samples");
  const int q = by_class.rbegin()->first + 1;
  if (static_cast<int>(by_class.size()) != q) throw Error(ErrorCode::InvalidInput, "some class label has no samples");
  std::vector<int> sizes;
  long n = 0;
  for (const auto& [label, rows] : by_class) {
    sizes.push_back(static_cast<int>(rows.size()));
    n += static_cast<long>(rows.size());
  }
  Mat x0(m, n);
  Eigen::Index col = 0;
  for (const auto& [label, rows] : by_class)
    for (const auto& v : rows) x0.col(col++) = v;
  return ClassifiedDataset(std::move(x0), std::move(sizes));
}

void write_csv(std::ostream& out, const ClassifiedDataset& ds, bool header) {
  out << std::setprecision(17);
  if (header) {
    for (int i = 0; i < ds.m(); ++i) out << "x" << i << ",";
    out << "label\n";
  }
  for (int c = 0; c < ds.n(); ++c) {
    for (int i = 0; i < ds.m(); ++i) out << ds.x0()(i, c) << ",";
    out << ds.label_of(c) << "\n";
  }
}

Mat inputs_from_csv(std::istream& in, int m, bool has_header) {
  std::string line;
  if (has_header) std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (blank(line)) continue;
    auto row = parse_row(line);
    // A trailing label column is tolerated and ignored.
    if (static_cast<int>(row.size()) == m + 1) row.pop_back();
    if (static_cast<int>(row.size()) != m) throw Error(ErrorCode::DimensionError, "input row width != M");
    rows.push_back(std::move(row));
  }
  Mat xs(m, static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k)
    for (int i = 0; i < m; ++i) xs(i, static_cast<Eigen::Index>(k)) = rows[k][static_cast<std::size_t>(i)];
  return xs;
}

json to_json(const CostReport& r) {
  json j{{"kind", "eval"},
         {"cost_l2", r.cost_l2},
         {"cost_weighted", r.cost_weighted},
         {"bound_general", r.bound_general},
         {"bound_deltap", r.bound_deltap},
         {"delta", r.delta},
         {"delta_p", r.delta_p},
         {"rho", r.rho}};
  put_optional(j, "exact_min_weighted", r.exact_min_weighted);
  put_optional(j, "projector_residual", r.projector_residual);
  put_optional(j, "first_order_estimate", r.first_order_estimate);
  put_optional(j, "lambda_min", r.lambda_min);
  put_optional(j, "lambda_max", r.lambda_max);
  put_optional(j, "delta1_rel", r.delta1_rel);
  put_optional(j, "delta2_rel", r.delta2_rel);
  return j;
}

json to_json(const TruncationResult& r, bool include_matrices) {
  json j{{"kind", "truncation"}};
  if (r.error) {
    j["error"] = *r.error;
    return j;
  }
  j["rank_x0_preserved"] = r.rank_x0_preserved;
  j["rank_means_preserved"] = r.rank_means_preserved;
  j["rank_marginal"] = r.rank_marginal;
  j["in_fixed_point_region"] = r.in_fixed_point_region;
  j["fixed_point_defect"] = r.fixed_point_defect;
  put_optional(j, "min_cost_weighted", r.min_cost_weighted);
  put_optional(j, "delta_p_tr", r.delta_p_tr);
  put_optional(j, "first_order_estimate_tr", r.first_order_estimate_tr);
  put_optional(j, "projector_residual_tr", r.projector_residual_tr);
  put_optional(j, "tied_lsq_min", r.tied_lsq_min);
  put_optional(j, "affine_lsq_min", r.affine_lsq_min);
  if (include_matrices) {
    j["tau_x0"] = to_json(r.tau_x0);
    put_optional(j, "delta1_rel_tr", r.delta1_rel_tr);
    put_optional(j, "delta2_rel_tr", r.delta2_rel_tr);
  }
  return j;
}

json to_json(const CompareReport& r) {
  json j{{"kind", "compare"},
         {"gd", {{"cost_l2", r.gd.cost_l2}, {"cost_weighted", r.gd.cost_weighted}}},
         {"constructive",
          {{"cost_l2", r.constructive.cost_l2}, {"cost_weighted", r.constructive.cost_weighted}}},
         {"bound_general", r.bound_general},
         {"bound_deltap", r.bound_deltap}};
  put_optional(j, "exact_min_weighted", r.exact_min_weighted);
  if (r.gd_in_fixed_point_region) j["gd_in_fixed_point_region"] = *r.gd_in_fixed_point_region;
  return j;
}

std::vector<FirstLayer> grid_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorCode::InvalidInput, "grid must be a JSON list");
  std::vector<FirstLayer> grid;
  try {
    for (const auto& point : j) grid.push_back({matrix_from_json(point.at("w1")), vector_from_json(point.at("b1"))});
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("bad grid JSON: ") + e.what());
  }
  return grid;
}

void write_trace_csv(std::ostream& out, const std::vector<TracePoint>& trace) {
  out << "step,cost\n" << std::setprecision(17);
  for (const auto& t : trace) out << t.step << "," << t.cost_l2 << "\n";
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingArtifact, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidInput, path + ": " + e.what());
  }
}

ClassifiedDataset read_dataset(const std::string& path, bool csv_header) {
  const bool is_csv = path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
  if (!is_csv) return dataset_from_json(read_json_file(path));
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingArtifact, "cannot open " + path);
  return dataset_from_csv(in, csv_header);
}

}  // namespace shallow::io
