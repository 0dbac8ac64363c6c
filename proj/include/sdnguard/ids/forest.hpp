#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "sdnguard/dataset.hpp"
#include "sdnguard/ids/classifier.hpp"
#include "sdnguard/ids/tree.hpp"

namespace sdnguard::ids {

using ClassCounts = std::array<double, kNumLabels>;

// Gini-split classification tree whose leaves hold class-count histograms.
class ClassificationTree {
 public:
  ClassificationTree() = default;
  ClassificationTree(std::vector<TreeNode> nodes, std::vector<ClassCounts> leaf_counts);

  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  const std::vector<ClassCounts>& leaf_counts() const noexcept { return leaf_counts_; }

  // Normalized histogram of the leaf x lands in.
  const ClassProbabilities& leaf_distribution(std::span<const double> x) const noexcept {
    return leaf_dist_[static_cast<std::size_t>(find_leaf(nodes_, x))];
  }

 private:
  std::vector<TreeNode> nodes_;
  std::vector<ClassCounts> leaf_counts_;
  std::vector<ClassProbabilities> leaf_dist_;
};

struct ForestParams {
  int n_trees = 100;
  int max_depth = 12;
  double min_leaf = 2.0;
  // Share of features tried per split; <= 0 means sqrt(d)/d.
  double feature_fraction = 0.0;
  bool bootstrap = true;
  std::size_t max_bins = 255;
  std::uint64_t seed = 1;
};

class ForestModel final : public Classifier {
 public:
  ForestModel(std::vector<std::string> feature_names, ForestParams params,
              std::vector<ClassificationTree> trees);

  std::string_view kind() const noexcept override { return "forest"; }
  const std::vector<std::string>& feature_names() const noexcept override { return features_; }

  // Mean of the per-tree leaf distributions.
  ClassProbabilities predict_proba(std::span<const double> x) const override;

  const ForestParams& params() const noexcept { return params_; }
  const std::vector<ClassificationTree>& trees() const noexcept { return trees_; }

 private:
  std::vector<std::string> features_;
  ForestParams params_;
  std::vector<ClassificationTree> trees_;
};

// Bagged CART trees with per-split feature subsampling. Deterministic in
// params.seed.
ForestModel train_forest(const LabeledDataset& d, const ForestParams& params);

}  // namespace sdnguard::ids
