#include "sdnguard/ids/external.hpp"

#include <cmath>
#include <limits>

#include "sdnguard/error.hpp"

namespace sdnguard::ids {

ClassProbabilities to_simplex(ClassProbabilities p) noexcept {
  double total = 0.0;
  for (double& v : p.p) {
    if (!(v > 0.0) || !std::isfinite(v)) v = 0.0;
    total += v;
  }
  if (total <= 0.0) {
    ClassProbabilities normal;
    normal[Label::Normal] = 1.0;
    return normal;
  }
  for (double& v : p.p) v /= total;
  return p;
}

ExternalModel::ExternalModel(std::string id, std::vector<std::string> feature_names, ScoringFn fn)
    : id_(std::move(id)), features_(std::move(feature_names)), fn_(std::move(fn)) {
  if (!fn_) throw Error(Errc::InvalidInput, "external model " + id_ + " has no scoring function");
}

ClassProbabilities ExternalModel::predict_proba(std::span<const double> x) const {
  check_schema(*this, x);
  return to_simplex(fn_(x));
}

ExternalTableModel::ExternalTableModel(std::string id, std::vector<std::string> feature_names,
                                       std::vector<TablePrototype> table)
    : id_(std::move(id)), features_(std::move(feature_names)), table_(std::move(table)) {
  if (table_.empty()) throw Error(Errc::InvalidInput, "external table " + id_ + " is empty");
  for (auto& row : table_) {
    if (row.point.size() != features_.size()) {
      throw Error(Errc::SchemaMismatch, "external table " + id_ + " prototype width mismatch");
    }
    row.probs = to_simplex(row.probs);
  }
}

ClassProbabilities ExternalTableModel::predict_proba(std::span<const double> x) const {
  check_schema(*this, x);
  double best = std::numeric_limits<double>::infinity();
  const TablePrototype* hit = &table_.front();
  for (const auto& row : table_) {
    double d2 = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double diff = x[j] - row.point[j];
      d2 += diff * diff;
    }
    if (d2 < best) {
      best = d2;
      hit = &row;
    }
  }
  return hit->probs;
}

}  // namespace sdnguard::ids
