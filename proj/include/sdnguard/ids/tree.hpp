#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace sdnguard::ids {

// Axis-aligned binary split; `feature < 0` marks a leaf whose payload lives
// at index `leaf` of the owning tree's leaf table.
struct TreeNode {
  std::int32_t feature = -1;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::int32_t leaf = -1;

  bool is_leaf() const noexcept { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

// Walks from the root: x[feature] <= threshold goes left. Returns the leaf slot.
inline std::int32_t find_leaf(std::span<const TreeNode> nodes, std::span<const double> x) noexcept {
  std::int32_t i = 0;
  while (!nodes[static_cast<std::size_t>(i)].is_leaf()) {
    const TreeNode& n = nodes[static_cast<std::size_t>(i)];
    i = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(i)].leaf;
}

// Structural check used by the model loader: indices in range, every path
// ends at a leaf, no cycles. Returns false on any violation.
bool validate_tree(std::span<const TreeNode> nodes, std::size_t feature_count,
                   std::size_t leaf_count);

int tree_depth(std::span<const TreeNode> nodes);

}  // namespace sdnguard::ids
