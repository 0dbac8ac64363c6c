#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sdnguard/ids/classifier.hpp"

namespace sdnguard::ids {

// A model trained elsewhere (e.g. a sequence network) exposed through a
// scoring function. Outputs are renormalized onto the simplex.
class ExternalModel final : public Classifier {
 public:
  using ScoringFn = std::function<ClassProbabilities(std::span<const double>)>;

  ExternalModel(std::string id, std::vector<std::string> feature_names, ScoringFn fn);

  std::string_view kind() const noexcept override { return "external"; }
  const std::vector<std::string>& feature_names() const noexcept override { return features_; }
  ClassProbabilities predict_proba(std::span<const double> x) const override;

  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
  std::vector<std::string> features_;
  ScoringFn fn_;
};

// Exported lookup table: a set of prototypes in normalized feature space,
// each with a class distribution. Scoring returns the distribution of the
// nearest prototype (squared Euclidean; earliest entry wins ties).
struct TablePrototype {
  std::vector<double> point;
  ClassProbabilities probs;
};

class ExternalTableModel final : public Classifier {
 public:
  ExternalTableModel(std::string id, std::vector<std::string> feature_names,
                     std::vector<TablePrototype> table);

  std::string_view kind() const noexcept override { return "external-table"; }
  const std::vector<std::string>& feature_names() const noexcept override { return features_; }
  ClassProbabilities predict_proba(std::span<const double> x) const override;

  const std::string& id() const noexcept { return id_; }
  const std::vector<TablePrototype>& table() const noexcept { return table_; }

 private:
  std::string id_;
  std::vector<std::string> features_;
  std::vector<TablePrototype> table_;
};

// Clamps negatives to 0 and rescales to sum 1; an all-zero input becomes a
// point mass on Normal.
ClassProbabilities to_simplex(ClassProbabilities p) noexcept;

}  // namespace sdnguard::ids
