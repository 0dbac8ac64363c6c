#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "sdnguard/flow_engine.hpp"
#include "sdnguard/labels.hpp"

namespace sdnguard {

// Row-major feature matrix with one label per row.
struct LabeledDataset {
  std::vector<std::string> feature_names;
  std::vector<double> values;
  std::vector<Label> labels;

  std::size_t rows() const noexcept { return labels.size(); }
  std::size_t cols() const noexcept { return feature_names.size(); }
  std::span<const double> row(std::size_t i) const noexcept {
    return {values.data() + i * cols(), cols()};
  }
  void add_row(std::span<const double> x, Label y);

  LabeledDataset subset(std::span<const std::size_t> indices) const;
};

LabeledDataset make_dataset(const std::vector<FeatureVector>& rows, const std::vector<Label>& labels);

// How one named feature is derived from CSV columns:
//   value = scale * sum(columns) [/ sum(divide_by) when divide_by is set; 0 when that sum is 0]
// An empty `columns` list yields the constant `scale * 0 = 0` unless `constant` is set.
struct FeatureColumn {
  std::string name;
  std::vector<std::string> columns;
  double scale = 1.0;
  std::vector<std::string> divide_by;
  std::optional<double> constant;
};

struct FlowCsvSchema {
  std::string label_column = "label";
  std::vector<FeatureColumn> features;
};

// Column names equal to the 12 feature names plus a `label` column; what
// write_flow_csv emits.
FlowCsvSchema default_flow_schema();
// JSON: {"label_column": "...", "features": [{"name", "columns", "scale", "divide_by", "constant"}]}
FlowCsvSchema load_flow_schema(const std::string& path);

// Missing cells (empty, NaN, Infinity) take the mean of the column's other
// values. Unknown labels and non-numeric cells raise UnparsableCell.
LabeledDataset load_flow_csv(const std::string& path, const FlowCsvSchema& schema);
LabeledDataset read_flow_csv(std::istream& in, const FlowCsvSchema& schema);
void write_flow_csv(std::ostream& out, const LabeledDataset& d);

}  // namespace sdnguard
