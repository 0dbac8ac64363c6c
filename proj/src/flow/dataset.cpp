#include "sdnguard/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <unordered_map>

#include <json.hpp>

#include "sdnguard/error.hpp"
#include "sdnguard/trace_io.hpp"

namespace sdnguard {

void LabeledDataset::add_row(std::span<const double> x, Label y) {
  if (x.size() != cols()) throw Error(Errc::SchemaMismatch, "row width differs from schema");
  values.insert(values.end(), x.begin(), x.end());
  labels.push_back(y);
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> indices) const {
  LabeledDataset out;
  out.feature_names = feature_names;
  out.values.reserve(indices.size() * cols());
  out.labels.reserve(indices.size());
  for (std::size_t i : indices) out.add_row(row(i), labels[i]);
  return out;
}

LabeledDataset make_dataset(const std::vector<FeatureVector>& rows, const std::vector<Label>& labels) {
  if (rows.size() != labels.size()) throw Error(Errc::InvalidInput, "rows and labels differ in count");
  LabeledDataset d;
  d.feature_names = FeatureVector::names();
  d.values.reserve(rows.size() * FeatureVector::kSize);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto v = rows[i].values();
    d.add_row(v, labels[i]);
  }
  return d;
}

FlowCsvSchema default_flow_schema() {
  FlowCsvSchema s;
  for (const auto& name : FeatureVector::names()) {
    s.features.push_back({name, {name}, 1.0, {}, std::nullopt});
  }
  return s;
}

FlowCsvSchema load_flow_schema(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoFailure, "cannot open schema " + path);
  FlowCsvSchema s;
  try {
    const auto j = nlohmann::json::parse(in);
    s.label_column = j.value("label_column", std::string("label"));
    for (const auto& f : j.at("features")) {
      FeatureColumn c;
      c.name = f.at("name").get<std::string>();
      c.columns = f.value("columns", std::vector<std::string>{});
      c.scale = f.value("scale", 1.0);
      c.divide_by = f.value("divide_by", std::vector<std::string>{});
      if (f.contains("constant")) c.constant = f.at("constant").get<double>();
      s.features.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidConfig, "schema " + path + ": " + e.what());
  }
  return s;
}

namespace {

bool is_missing(const std::string& cell) {
  if (cell.empty()) return true;
  std::string low;
  for (char c : cell) low.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return low == "nan" || low == "inf" || low == "-inf" || low == "infinity" || low == "-infinity";
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

// "Flow_Duration", "flow duration" and "Flow Duration" name the same column.
std::string header_key(const std::string& name) {
  std::string k;
  for (char c : trim(name)) k.push_back(c == '_' ? ' ' : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return k;
}

}  // namespace

LabeledDataset read_flow_csv(std::istream& in, const FlowCsvSchema& schema) {
  std::string line;
  // Leading "# ..." lines carry provenance such as the config hash.
  do {
    if (!std::getline(in, line)) throw Error(Errc::MissingColumn, "empty flow file");
  } while (!line.empty() && line[0] == '#');
  const auto header = split_csv_line(line);
  std::unordered_map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col.emplace(header_key(header[i]), i);

  // Every raw column any feature touches, in first-use order.
  std::vector<std::string> raw_names;
  std::unordered_map<std::string, std::size_t> raw_index;
  auto need = [&](const std::string& name) {
    if (!col.count(header_key(name))) throw Error(Errc::MissingColumn, "column '" + name + "' not in header");
    if (!raw_index.count(name)) {
      raw_index[name] = raw_names.size();
      raw_names.push_back(name);
    }
  };
  for (const auto& f : schema.features) {
    for (const auto& c : f.columns) need(c);
    for (const auto& c : f.divide_by) need(c);
  }
  if (!col.count(header_key(schema.label_column))) {
    throw Error(Errc::MissingColumn, "label column '" + schema.label_column + "' not in header");
  }

  const std::size_t r = raw_names.size();
  std::vector<std::size_t> raw_col;
  for (const auto& name : raw_names) raw_col.push_back(col.at(header_key(name)));
  const std::size_t label_col = col.at(header_key(schema.label_column));
  std::vector<double> raw;
  std::vector<char> missing;
  std::vector<Label> labels;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() < header.size()) {
      throw Error(Errc::UnparsableCell, "row " + std::to_string(row) + " has too few fields");
    }
    for (std::size_t k = 0; k < r; ++k) {
      const std::string cell = trim(cells[raw_col[k]]);
      if (is_missing(cell)) {
        raw.push_back(0.0);
        missing.push_back(1);
        continue;
      }
      double v = 0.0;
      auto [next, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc{} || next != cell.data() + cell.size()) {
        throw Error(Errc::UnparsableCell, "row " + std::to_string(row) + " column '" +
                                              raw_names[k] + "': '" + cell + "'");
      }
      raw.push_back(v);
      missing.push_back(0);
    }
    const std::string label_cell = trim(cells[label_col]);
    auto label = parse_label(label_cell);
    if (!label) {
      throw Error(Errc::UnparsableCell,
                  "row " + std::to_string(row) + ": unknown label '" + label_cell + "'");
    }
    labels.push_back(*label);
    ++row;
  }

  // Mean imputation per raw column.
  for (std::size_t k = 0; k < r; ++k) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < row; ++i) {
      if (!missing[i * r + k]) {
        sum += raw[i * r + k];
        ++n;
      }
    }
    const double mean = n > 0 ? sum / static_cast<double>(n) : 0.0;
    for (std::size_t i = 0; i < row; ++i) {
      if (missing[i * r + k]) raw[i * r + k] = mean;
    }
  }

  LabeledDataset d;
  for (const auto& f : schema.features) d.feature_names.push_back(f.name);
  d.values.reserve(row * schema.features.size());
  d.labels = std::move(labels);
  for (std::size_t i = 0; i < row; ++i) {
    for (const auto& f : schema.features) {
      if (f.constant) {
        d.values.push_back(*f.constant);
        continue;
      }
      double num = 0.0;
      for (const auto& c : f.columns) num += raw[i * r + raw_index[c]];
      double v = f.scale * num;
      if (!f.divide_by.empty()) {
        double den = 0.0;
        for (const auto& c : f.divide_by) den += raw[i * r + raw_index[c]];
        v = den != 0.0 ? v / den : 0.0;
      }
      d.values.push_back(v);
    }
  }
  return d;
}

LabeledDataset load_flow_csv(const std::string& path, const FlowCsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoFailure, "cannot open " + path);
  return read_flow_csv(in, schema);
}

void write_flow_csv(std::ostream& out, const LabeledDataset& d) {
  for (const auto& n : d.feature_names) out << n << ',';
  out << "label\n";
  char buf[40];
  for (std::size_t i = 0; i < d.rows(); ++i) {
    for (double v : d.row(i)) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << buf << ',';
    }
    out << label_name(d.labels[i]) << '\n';
  }
}

}  // namespace sdnguard
