#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sdnguard/dataset.hpp"

namespace sdnguard::ids {

// Quantile histogram binning shared by the tree growers. A value x falls in
// bin b = #{cuts < x}, so `bin(x) <= b` is equivalent to `x <= cuts[b]` and a
// bin-space split maps back to a real-valued threshold.
class BinnedMatrix {
 public:
  BinnedMatrix(const LabeledDataset& d, std::size_t max_bins = 255);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cuts_.size(); }
  std::size_t bin_count(std::size_t feature) const noexcept { return cuts_[feature].size() + 1; }
  std::uint8_t bin(std::size_t row, std::size_t feature) const noexcept {
    return bins_[feature * rows_ + row];
  }
  const std::uint8_t* column(std::size_t feature) const noexcept { return &bins_[feature * rows_]; }
  // Real threshold equivalent to "bin <= b".
  double threshold(std::size_t feature, std::size_t b) const noexcept { return cuts_[feature][b]; }

 private:
  std::size_t rows_ = 0;
  std::vector<std::vector<double>> cuts_;
  std::vector<std::uint8_t> bins_;  // column-major
};

}  // namespace sdnguard::ids
