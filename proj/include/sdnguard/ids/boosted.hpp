#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sdnguard/dataset.hpp"
#include "sdnguard/ids/classifier.hpp"
#include "sdnguard/ids/tree.hpp"

namespace sdnguard::ids {

class RegressionTree {
 public:
  RegressionTree() = default;
  RegressionTree(std::vector<TreeNode> nodes, std::vector<double> leaf_values)
      : nodes_(std::move(nodes)), leaf_values_(std::move(leaf_values)) {}

  double predict(std::span<const double> x) const noexcept {
    return leaf_values_[static_cast<std::size_t>(find_leaf(nodes_, x))];
  }
  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& leaf_values() const noexcept { return leaf_values_; }

 private:
  std::vector<TreeNode> nodes_;
  std::vector<double> leaf_values_;
};

// One boosting round: a weight and one regression tree per modelled class.
struct BoostStage {
  double weight = 0.0;
  std::vector<RegressionTree> trees;
};

struct BoostedParams {
  int stages = 100;
  double learning_rate = 0.3;
  int max_depth = 6;
  double lambda = 1.0;           // L2 penalty on leaf values
  double gamma = 0.0;            // per-split complexity cost
  double min_child_weight = 1e-3;  // minimum hessian mass per child
  double row_subsample = 1.0;
  double col_subsample = 1.0;
  std::size_t max_bins = 255;
  std::uint64_t seed = 1;
  // Free-form tag recorded in the model file ("xgb", "cat", ...).
  std::string variant = "xgb";
};

// Softmax gradient-boosted trees. Class scores are
//   score_c(x) = offset_c + sum_k weight_k * tree_{k,c}(x)
// and probabilities are the softmax over the modelled classes; classes absent
// from training get probability 0.
class BoostedModel final : public Classifier {
 public:
  BoostedModel(std::vector<std::string> feature_names, BoostedParams params,
               std::vector<Label> classes, std::vector<double> offsets,
               std::vector<BoostStage> stages, std::vector<double> loss_history = {});

  std::string_view kind() const noexcept override { return "boosted"; }
  const std::vector<std::string>& feature_names() const noexcept override { return features_; }
  ClassProbabilities predict_proba(std::span<const double> x) const override;

  const BoostedParams& params() const noexcept { return params_; }
  const std::vector<Label>& classes() const noexcept { return classes_; }
  const std::vector<double>& offsets() const noexcept { return offsets_; }
  const std::vector<BoostStage>& stages() const noexcept { return stages_; }
  // Mean training log-loss: entry 0 is the offsets-only model, entry k is
  // after stage k.
  const std::vector<double>& loss_history() const noexcept { return loss_history_; }

 private:
  std::vector<std::string> features_;
  BoostedParams params_;
  std::vector<Label> classes_;
  std::vector<double> offsets_;
  std::vector<BoostStage> stages_;
  std::vector<double> loss_history_;
};

// Newton boosting on the multinomial log-loss with an L2 leaf penalty. Each
// stage's weight is learning_rate, halved until the training loss does not
// increase (0 if no halving helps), so loss_history is non-increasing.
BoostedModel train_boosted(const LabeledDataset& d, const BoostedParams& params);

}  // namespace sdnguard::ids
