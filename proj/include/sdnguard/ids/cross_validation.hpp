#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "sdnguard/dataset.hpp"
#include "sdnguard/ids/classifier.hpp"
#include "sdnguard/metrics.hpp"

namespace sdnguard::ids {

// Fold index per row. Rows of each class are shuffled (seeded) and dealt
// round-robin, continuing the deal across classes, so per-class and overall
// fold sizes each differ by at most one. Throws ClassTooSmall when a present
// class has fewer than k rows.
std::vector<int> stratified_folds(const std::vector<Label>& labels, int k, std::uint64_t seed);

// Trains on the training split and returns a model to score the held-out split.
using FitFn = std::function<std::shared_ptr<const Classifier>(const LabeledDataset& train)>;

struct FoldResult {
  int fold = 0;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  metrics::ConfusionMatrix binary;
  metrics::MultiClassConfusion per_class;
  double accuracy_pct = 0.0;
  std::optional<double> fpr;  // empty when the fold has no Normal rows
};

std::vector<FoldResult> cross_validate(const LabeledDataset& d, int k, const FitFn& fit,
                                       std::uint64_t seed = 1);

}  // namespace sdnguard::ids
