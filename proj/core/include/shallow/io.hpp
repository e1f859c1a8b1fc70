#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "shallow/constructive.hpp"
#include "shallow/cost.hpp"
#include "shallow/dataset.hpp"
#include "shallow/gd_baseline.hpp"
#include "shallow/network.hpp"
#include "shallow/truncation.hpp"

namespace shallow::io {

using nlohmann::json;

// Matrices are nested row-major arrays; vectors are flat arrays.
json to_json(const Mat& a);
json to_json(const Vec& v);
Mat matrix_from_json(const json& j);
Vec vector_from_json(const json& j);

json to_json(const ShallowParams& p);
ShallowParams params_from_json(const json& j);

std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);

json to_json(const Provenance& p);
/// {"kind": "train", "params": {...}, "provenance": {...}}
json train_artifact(const TrainedNetwork& t);

/// {"m", "q", "classes": [[x, ...], ...], "y": Q x Q row-major}
json to_json(const ClassifiedDataset& ds);
ClassifiedDataset dataset_from_json(const json& j);

/// One sample per row: M features then a 0-based integer class label.
/// Samples are regrouped class-by-class preserving file order within a class.
ClassifiedDataset dataset_from_csv(std::istream& in, bool has_header);
void write_csv(std::ostream& out, const ClassifiedDataset& ds, bool header);

/// Rows of M features each (no label); returns M x K.
Mat inputs_from_csv(std::istream& in, int m, bool has_header);

json to_json(const CostReport& r);
json to_json(const TruncationResult& r, bool include_matrices = false);
json to_json(const CompareReport& r);

std::vector<FirstLayer> grid_from_json(const json& j);

void write_trace_csv(std::ostream& out, const std::vector<TracePoint>& trace);

/// Loads a whole file as JSON; throws MissingArtifact if it cannot be opened.
json read_json_file(const std::string& path);
/// Either a JSON dataset or a CSV file (chosen by extension).
ClassifiedDataset read_dataset(const std::string& path, bool csv_header);

}  // namespace shallow::io
