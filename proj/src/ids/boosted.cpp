#include "sdnguard/ids/boosted.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sdnguard/error.hpp"
#include "sdnguard/ids/binning.hpp"
#include "sdnguard/rng.hpp"

namespace sdnguard::ids {

namespace {

// In-place softmax over `scores`; returns log-sum-exp.
double softmax(std::span<double> scores) {
  const double m = *std::max_element(scores.begin(), scores.end());
  double z = 0.0;
  for (double& s : scores) {
    s = std::exp(s - m);
    z += s;
  }
  for (double& s : scores) s /= z;
  return m + std::log(z);
}

double mean_log_loss(const std::vector<double>& scores, const std::vector<std::size_t>& y,
                     std::size_t nc) {
  const std::size_t n = y.size();
  double total = 0.0;
  std::vector<double> buf(nc);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy_n(scores.begin() + static_cast<std::ptrdiff_t>(i * nc), nc, buf.begin());
    const double m = *std::max_element(buf.begin(), buf.end());
    double z = 0.0;
    for (double s : buf) z += std::exp(s - m);
    total += (m + std::log(z)) - buf[y[i]];
  }
  return total / static_cast<double>(n);
}

struct Task {
  std::int32_t node;
  std::size_t begin;
  std::size_t end;
  int depth;
};

RegressionTree grow_regression_tree(const BinnedMatrix& bins, const std::vector<double>& g,
                                    const std::vector<double>& h, std::vector<std::size_t> rows,
                                    const std::vector<std::size_t>& features,
                                    const BoostedParams& params) {
  std::vector<TreeNode> nodes(1);
  std::vector<double> leaves;
  std::vector<Task> stack{{0, 0, rows.size(), 0}};
  std::vector<double> hg;
  std::vector<double> hh;
  const double lambda = params.lambda;

  while (!stack.empty()) {
    const Task task = stack.back();
    stack.pop_back();
    double G = 0.0;
    double H = 0.0;
    for (std::size_t k = task.begin; k < task.end; ++k) {
      G += g[rows[k]];
      H += h[rows[k]];
    }
    auto make_leaf = [&] {
      nodes[static_cast<std::size_t>(task.node)].leaf = static_cast<std::int32_t>(leaves.size());
      leaves.push_back(-G / (H + lambda));
    };
    if (task.depth >= params.max_depth || H < 2.0 * params.min_child_weight ||
        task.end - task.begin < 2) {
      make_leaf();
      continue;
    }
    const double parent = G * G / (H + lambda);
    double best_gain = 1e-12;
    std::int32_t best_feature = -1;
    std::size_t best_bin = 0;
    for (std::size_t f : features) {
      const std::size_t nb = bins.bin_count(f);
      if (nb < 2) continue;
      hg.assign(nb, 0.0);
      hh.assign(nb, 0.0);
      const std::uint8_t* col = bins.column(f);
      for (std::size_t k = task.begin; k < task.end; ++k) {
        const std::size_t r = rows[k];
        hg[col[r]] += g[r];
        hh[col[r]] += h[r];
      }
      double gl = 0.0;
      double hl = 0.0;
      for (std::size_t b = 0; b + 1 < nb; ++b) {
        gl += hg[b];
        hl += hh[b];
        const double gr = G - gl;
        const double hr = H - hl;
        if (hl < params.min_child_weight) continue;
        if (hr < params.min_child_weight) break;
        const double gain =
            0.5 * (gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - parent) - params.gamma;
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
    const std::uint8_t* col = bins.column(static_cast<std::size_t>(best_feature));
    auto mid = std::stable_partition(rows.begin() + static_cast<std::ptrdiff_t>(task.begin),
                                     rows.begin() + static_cast<std::ptrdiff_t>(task.end),
                                     [&](std::size_t r) { return col[r] <= best_bin; });
    const std::size_t split = static_cast<std::size_t>(mid - rows.begin());
    const auto left_id = static_cast<std::int32_t>(nodes.size());
    nodes.push_back({});
    nodes.push_back({});
    TreeNode& n = nodes[static_cast<std::size_t>(task.node)];
    n.feature = best_feature;
    n.threshold = bins.threshold(static_cast<std::size_t>(best_feature), best_bin);
    n.left = left_id;
    n.right = left_id + 1;
    stack.push_back({left_id + 1, split, task.end, task.depth + 1});
    stack.push_back({left_id, task.begin, split, task.depth + 1});
  }
  return RegressionTree(std::move(nodes), std::move(leaves));
}

}  // namespace

BoostedModel::BoostedModel(std::vector<std::string> feature_names, BoostedParams params,
                           std::vector<Label> classes, std::vector<double> offsets,
                           std::vector<BoostStage> stages, std::vector<double> loss_history)
    : features_(std::move(feature_names)),
      params_(std::move(params)),
      classes_(std::move(classes)),
      offsets_(std::move(offsets)),
      stages_(std::move(stages)),
      loss_history_(std::move(loss_history)) {
  if (classes_.empty() || offsets_.size() != classes_.size()) {
    throw Error(Errc::InvalidInput, "boosted model needs one offset per class");
  }
  for (const auto& s : stages_) {
    if (s.trees.size() != classes_.size()) {
      throw Error(Errc::InvalidInput, "every stage needs one tree per class");
    }
  }
}

ClassProbabilities BoostedModel::predict_proba(std::span<const double> x) const {
  check_schema(*this, x);
  const std::size_t nc = classes_.size();
  double scores[kNumLabels];
  for (std::size_t c = 0; c < nc; ++c) scores[c] = offsets_[c];
  for (const auto& stage : stages_) {
    for (std::size_t c = 0; c < nc; ++c) scores[c] += stage.weight * stage.trees[c].predict(x);
  }
  softmax(std::span<double>(scores, nc));
  ClassProbabilities out;
  for (std::size_t c = 0; c < nc; ++c) out[classes_[c]] = scores[c];
  return out;
}

BoostedModel train_boosted(const LabeledDataset& d, const BoostedParams& params) {
  if (d.rows() == 0) throw Error(Errc::EmptyDataset, "cannot boost on zero rows");
  if (params.stages < 1) throw Error(Errc::InvalidConfig, "boosting needs at least one stage");
  if (!(params.learning_rate > 0.0 && params.learning_rate <= 1.0)) {
    throw Error(Errc::InvalidConfig, "learning rate must be in (0, 1]");
  }
  if (!(params.row_subsample > 0.0 && params.row_subsample <= 1.0) ||
      !(params.col_subsample > 0.0 && params.col_subsample <= 1.0)) {
    throw Error(Errc::InvalidConfig, "subsample fractions must be in (0, 1]");
  }
  if (params.lambda < 0.0) throw Error(Errc::InvalidConfig, "lambda must be >= 0");

  const std::size_t n = d.rows();
  std::vector<Label> classes;
  for (Label l : kAllLabels) {
    if (std::find(d.labels.begin(), d.labels.end(), l) != d.labels.end()) classes.push_back(l);
  }
  const std::size_t nc = classes.size();
  std::vector<std::size_t> y(n);
  std::vector<double> prior(nc, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = static_cast<std::size_t>(std::find(classes.begin(), classes.end(), d.labels[i]) -
                                    classes.begin());
    prior[y[i]] += 1.0;
  }
  std::vector<double> offsets(nc);
  for (std::size_t c = 0; c < nc; ++c) offsets[c] = std::log(prior[c] / static_cast<double>(n));

  const BinnedMatrix bins(d, params.max_bins);
  std::vector<double> scores(n * nc);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy(offsets.begin(), offsets.end(), scores.begin() + static_cast<std::ptrdiff_t>(i * nc));
  }
  std::vector<double> losses{mean_log_loss(scores, y, nc)};

  Rng rng(params.seed);
  std::vector<double> probs(n * nc);
  std::vector<double> g(n);
  std::vector<double> h(n);
  std::vector<double> tree_out(n * nc);
  std::vector<double> trial(n * nc);
  std::vector<std::size_t> all_features(d.cols());
  std::iota(all_features.begin(), all_features.end(), std::size_t{0});
  std::vector<BoostStage> stages;

  for (int k = 0; k < params.stages; ++k) {
    probs = scores;
    for (std::size_t i = 0; i < n; ++i) softmax(std::span<double>(&probs[i * nc], nc));

    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < n; ++i) {
      if (params.row_subsample >= 1.0 || rng.uniform() < params.row_subsample) rows.push_back(i);
    }
    if (rows.empty()) rows.push_back(rng.below(n));

    BoostStage stage;
    for (std::size_t c = 0; c < nc; ++c) {
      for (std::size_t i = 0; i < n; ++i) {
        const double p = probs[i * nc + c];
        g[i] = p - (y[i] == c ? 1.0 : 0.0);
        h[i] = std::max(p * (1.0 - p), 1e-16);
        if (!std::isfinite(g[i]) || !std::isfinite(h[i])) {
          throw Error(Errc::NonFiniteGradient, "stage " + std::to_string(k) + " row " +
                                                   std::to_string(i));
        }
      }
      std::vector<std::size_t> features = all_features;
      if (params.col_subsample < 1.0) {
        const std::size_t keep = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::lround(params.col_subsample * static_cast<double>(d.cols()))));
        for (std::size_t j = 0; j < keep; ++j) {
          std::swap(features[j], features[j + rng.below(features.size() - j)]);
        }
        features.resize(keep);
        std::sort(features.begin(), features.end());
      }
      stage.trees.push_back(grow_regression_tree(bins, g, h, rows, features, params));
      for (std::size_t i = 0; i < n; ++i) tree_out[i * nc + c] = stage.trees.back().predict(d.row(i));
    }

    double alpha = params.learning_rate;
    double loss = losses.back();
    bool accepted = false;
    for (int halving = 0; halving < 30; ++halving) {
      for (std::size_t j = 0; j < n * nc; ++j) trial[j] = scores[j] + alpha * tree_out[j];
      const double candidate = mean_log_loss(trial, y, nc);
      if (!std::isfinite(candidate)) {
        throw Error(Errc::NonFiniteGradient, "loss became non-finite at stage " + std::to_string(k));
      }
      if (candidate <= losses.back()) {
        loss = candidate;
        accepted = true;
        break;
      }
      alpha /= 2.0;
    }
    if (accepted) {
      scores.swap(trial);
    } else {
      alpha = 0.0;
    }
    stage.weight = alpha;
    stages.push_back(std::move(stage));
    losses.push_back(loss);
  }
  return BoostedModel(d.feature_names, params, std::move(classes), std::move(offsets),
                      std::move(stages), std::move(losses));
}

}  // namespace sdnguard::ids
