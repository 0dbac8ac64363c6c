#include "sdnguard/ids/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sdnguard/error.hpp"
#include "sdnguard/ids/binning.hpp"
#include "sdnguard/rng.hpp"

namespace sdnguard::ids {

void check_schema(const Classifier& model, std::span<const double> x) {
  if (x.size() != model.feature_names().size()) {
    throw Error(Errc::SchemaMismatch, std::string(model.kind()) + " model expects " +
                                          std::to_string(model.feature_names().size()) +
                                          " features, got " + std::to_string(x.size()));
  }
}

ClassificationTree::ClassificationTree(std::vector<TreeNode> nodes,
                                       std::vector<ClassCounts> leaf_counts)
    : nodes_(std::move(nodes)), leaf_counts_(std::move(leaf_counts)) {
  leaf_dist_.reserve(leaf_counts_.size());
  for (const auto& counts : leaf_counts_) {
    double total = 0.0;
    for (double c : counts) total += c;
    ClassProbabilities p;
    for (std::size_t k = 0; k < kNumLabels; ++k) p.p[k] = total > 0.0 ? counts[k] / total : 0.0;
    if (total <= 0.0) p[Label::Normal] = 1.0;
    leaf_dist_.push_back(p);
  }
}

ForestModel::ForestModel(std::vector<std::string> feature_names, ForestParams params,
                         std::vector<ClassificationTree> trees)
    : features_(std::move(feature_names)), params_(params), trees_(std::move(trees)) {
  if (trees_.empty()) throw Error(Errc::InvalidInput, "forest needs at least one tree");
}

ClassProbabilities ForestModel::predict_proba(std::span<const double> x) const {
  check_schema(*this, x);
  ClassProbabilities out;
  for (const auto& t : trees_) {
    const auto& d = t.leaf_distribution(x);
    for (std::size_t k = 0; k < kNumLabels; ++k) out.p[k] += d.p[k];
  }
  const double n = static_cast<double>(trees_.size());
  for (double& v : out.p) v /= n;
  return out;
}

namespace {

struct Task {
  std::int32_t node;
  std::size_t begin;
  std::size_t end;
  int depth;
};

class TreeGrower {
 public:
  TreeGrower(const BinnedMatrix& bins, const std::vector<std::uint8_t>& y,
             const ForestParams& params, std::size_t mtry)
      : bins_(bins), y_(y), params_(params), mtry_(mtry) {}

  ClassificationTree grow(const std::vector<double>& weight, Rng& rng) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < weight.size(); ++i) {
      if (weight[i] > 0.0) rows.push_back(i);
    }
    std::vector<TreeNode> nodes(1);
    std::vector<ClassCounts> leaves;
    std::vector<std::size_t> features(bins_.cols());
    std::vector<Task> stack{{0, 0, rows.size(), 0}};
    std::vector<double> hist;

    while (!stack.empty()) {
      const Task task = stack.back();
      stack.pop_back();

      ClassCounts total{};
      for (std::size_t k = task.begin; k < task.end; ++k) {
        total[y_[rows[k]]] += weight[rows[k]];
      }
      const double w = std::accumulate(total.begin(), total.end(), 0.0);
      const bool pure = std::count_if(total.begin(), total.end(), [](double c) { return c > 0; }) <= 1;

      auto make_leaf = [&] {
        nodes[static_cast<std::size_t>(task.node)].leaf = static_cast<std::int32_t>(leaves.size());
        leaves.push_back(total);
      };
      if (task.depth >= params_.max_depth || pure || w < 2.0 * params_.min_leaf) {
        make_leaf();
        continue;
      }

      double parent_score = 0.0;
      for (double c : total) parent_score += c * c;
      parent_score /= w;

      std::iota(features.begin(), features.end(), std::size_t{0});
      for (std::size_t k = 0; k < mtry_; ++k) {
        std::swap(features[k], features[k + rng.below(features.size() - k)]);
      }

      double best_gain = 1e-12 * w;
      std::int32_t best_feature = -1;
      std::size_t best_bin = 0;
      for (std::size_t fi = 0; fi < mtry_; ++fi) {
        const std::size_t f = features[fi];
        const std::size_t nb = bins_.bin_count(f);
        if (nb < 2) continue;
        hist.assign(nb * kNumLabels, 0.0);
        const std::uint8_t* col = bins_.column(f);
        for (std::size_t k = task.begin; k < task.end; ++k) {
          const std::size_t r = rows[k];
          hist[col[r] * kNumLabels + y_[r]] += weight[r];
        }
        ClassCounts left{};
        double wl = 0.0;
        for (std::size_t b = 0; b + 1 < nb; ++b) {
          for (std::size_t c = 0; c < kNumLabels; ++c) {
            left[c] += hist[b * kNumLabels + c];
            wl += hist[b * kNumLabels + c];
          }
          const double wr = w - wl;
          if (wl < params_.min_leaf) continue;
          if (wr < params_.min_leaf) break;
          double sl = 0.0;
          double sr = 0.0;
          for (std::size_t c = 0; c < kNumLabels; ++c) {
            const double r = total[c] - left[c];
            sl += left[c] * left[c];
            sr += r * r;
          }
          const double gain = sl / wl + sr / wr - parent_score;
          if (gain > best_gain) {
            best_gain = gain;
            best_feature = static_cast<std::int32_t>(f);
            best_bin = b;
          }
        }
      }
      if (best_feature < 0) {
        make_leaf();
        continue;
      }

      const std::uint8_t* col = bins_.column(static_cast<std::size_t>(best_feature));
      auto mid = std::stable_partition(rows.begin() + static_cast<std::ptrdiff_t>(task.begin),
                                       rows.begin() + static_cast<std::ptrdiff_t>(task.end),
                                       [&](std::size_t r) { return col[r] <= best_bin; });
      const std::size_t split = static_cast<std::size_t>(mid - rows.begin());

      const auto left_id = static_cast<std::int32_t>(nodes.size());
      nodes.push_back({});
      nodes.push_back({});
      TreeNode& n = nodes[static_cast<std::size_t>(task.node)];
      n.feature = best_feature;
      n.threshold = bins_.threshold(static_cast<std::size_t>(best_feature), best_bin);
      n.left = left_id;
      n.right = left_id + 1;
      stack.push_back({left_id + 1, split, task.end, task.depth + 1});
      stack.push_back({left_id, task.begin, split, task.depth + 1});
    }
    return ClassificationTree(std::move(nodes), std::move(leaves));
  }

 private:
  const BinnedMatrix& bins_;
  const std::vector<std::uint8_t>& y_;
  const ForestParams& params_;
  std::size_t mtry_;
};

}  // namespace

ForestModel train_forest(const LabeledDataset& d, const ForestParams& params) {
  if (d.rows() == 0) throw Error(Errc::EmptyDataset, "cannot train a forest on zero rows");
  if (params.n_trees < 1) throw Error(Errc::InvalidConfig, "forest needs n_trees >= 1");
  if (params.max_depth < 0) throw Error(Errc::InvalidConfig, "max_depth must be >= 0");
  if (d.cols() == 0) throw Error(Errc::SchemaMismatch, "dataset has no features");

  const BinnedMatrix bins(d, params.max_bins);
  std::vector<std::uint8_t> y(d.rows());
  for (std::size_t i = 0; i < d.rows(); ++i) y[i] = static_cast<std::uint8_t>(index_of(d.labels[i]));

  const double frac = params.feature_fraction > 0.0
                          ? params.feature_fraction
                          : std::sqrt(static_cast<double>(d.cols())) / static_cast<double>(d.cols());
  const std::size_t mtry = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::lround(frac * static_cast<double>(d.cols()))), 1, d.cols());

  TreeGrower grower(bins, y, params, mtry);
  std::vector<ClassificationTree> trees;
  trees.reserve(static_cast<std::size_t>(params.n_trees));
  std::vector<double> weight(d.rows());
  for (int t = 0; t < params.n_trees; ++t) {
    Rng rng(params.seed, static_cast<std::uint64_t>(t));
    if (params.bootstrap) {
      std::fill(weight.begin(), weight.end(), 0.0);
      for (std::size_t k = 0; k < d.rows(); ++k) weight[rng.below(d.rows())] += 1.0;
    } else {
      std::fill(weight.begin(), weight.end(), 1.0);
    }
    trees.push_back(grower.grow(weight, rng));
  }
  return ForestModel(d.feature_names, params, std::move(trees));
}

}  // namespace sdnguard::ids
