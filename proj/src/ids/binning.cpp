#include "sdnguard/ids/binning.hpp"

#include <algorithm>

#include "sdnguard/error.hpp"
#include "sdnguard/ids/tree.hpp"

namespace sdnguard::ids {

namespace {

double midpoint(double a, double b) {
  const double m = a + (b - a) / 2.0;
  return m < b ? m : a;
}

std::vector<double> make_cuts(std::vector<double> column, std::size_t max_bins) {
  std::sort(column.begin(), column.end());
  std::vector<double> distinct;
  std::vector<std::size_t> counts;
  for (double v : column) {
    if (distinct.empty() || v != distinct.back()) {
      distinct.push_back(v);
      counts.push_back(1);
    } else {
      ++counts.back();
    }
  }
  std::vector<double> cuts;
  if (distinct.size() <= max_bins) {
    for (std::size_t i = 0; i + 1 < distinct.size(); ++i) {
      cuts.push_back(midpoint(distinct[i], distinct[i + 1]));
    }
    return cuts;
  }
  const double n = static_cast<double>(column.size());
  std::size_t cumulative = 0;
  std::size_t next_q = 1;
  for (std::size_t i = 0; i + 1 < distinct.size() && cuts.size() + 1 < max_bins; ++i) {
    cumulative += counts[i];
    const double target = n * static_cast<double>(next_q) / static_cast<double>(max_bins);
    if (static_cast<double>(cumulative) >= target) {
      cuts.push_back(midpoint(distinct[i], distinct[i + 1]));
      while (next_q < max_bins &&
             n * static_cast<double>(next_q) / static_cast<double>(max_bins) <=
                 static_cast<double>(cumulative)) {
        ++next_q;
      }
    }
  }
  return cuts;
}

}  // namespace

BinnedMatrix::BinnedMatrix(const LabeledDataset& d, std::size_t max_bins) : rows_(d.rows()) {
  if (max_bins < 2 || max_bins > 256) throw Error(Errc::InvalidConfig, "max_bins must be in [2,256]");
  const std::size_t cols = d.cols();
  cuts_.resize(cols);
  bins_.resize(cols * rows_);
  std::vector<double> column(rows_);
  for (std::size_t j = 0; j < cols; ++j) {
    for (std::size_t i = 0; i < rows_; ++i) column[i] = d.values[i * cols + j];
    cuts_[j] = make_cuts(column, max_bins);
    const auto& cuts = cuts_[j];
    for (std::size_t i = 0; i < rows_; ++i) {
      const auto b = std::lower_bound(cuts.begin(), cuts.end(), column[i]) - cuts.begin();
      bins_[j * rows_ + i] = static_cast<std::uint8_t>(b);
    }
  }
}

bool validate_tree(std::span<const TreeNode> nodes, std::size_t feature_count,
                   std::size_t leaf_count) {
  if (nodes.empty()) return false;
  // Children must point strictly forward, which rules out cycles.
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const TreeNode& n = nodes[i];
    if (n.is_leaf()) {
      if (n.leaf < 0 || static_cast<std::size_t>(n.leaf) >= leaf_count) return false;
      continue;
    }
    if (static_cast<std::size_t>(n.feature) >= feature_count) return false;
    for (std::int32_t c : {n.left, n.right}) {
      if (c <= static_cast<std::int32_t>(i) || static_cast<std::size_t>(c) >= nodes.size()) {
        return false;
      }
    }
  }
  return true;
}

int tree_depth(std::span<const TreeNode> nodes) {
  std::vector<int> depth(nodes.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    best = std::max(best, depth[i]);
    if (!nodes[i].is_leaf()) {
      depth[static_cast<std::size_t>(nodes[i].left)] = depth[i] + 1;
      depth[static_cast<std::size_t>(nodes[i].right)] = depth[i] + 1;
    }
  }
  return best;
}

}  // namespace sdnguard::ids
