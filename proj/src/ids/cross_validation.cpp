#include "sdnguard/ids/cross_validation.hpp"

#include <algorithm>

#include "sdnguard/error.hpp"
#include "sdnguard/rng.hpp"

namespace sdnguard::ids {

std::vector<int> stratified_folds(const std::vector<Label>& labels, int k, std::uint64_t seed) {
  if (k < 2) throw Error(Errc::InvalidConfig, "cross-validation needs k >= 2");
  std::array<std::vector<std::size_t>, kNumLabels> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[index_of(labels[i])].push_back(i);

  std::vector<int> fold(labels.size(), -1);
  Rng rng(seed, 0xf01d);
  int next = 0;
  for (Label l : kAllLabels) {
    auto& rows = by_class[index_of(l)];
    if (rows.empty()) continue;
    if (rows.size() < static_cast<std::size_t>(k)) {
      throw Error(Errc::ClassTooSmall, std::string(label_name(l)) + " has " + std::to_string(rows.size()) +
                                           " rows, fewer than " + std::to_string(k) + " folds");
    }
    for (std::size_t i = rows.size(); i > 1; --i) std::swap(rows[i - 1], rows[rng.below(i)]);
    for (std::size_t r : rows) {
      fold[r] = next;
      next = (next + 1) % k;
    }
  }
  return fold;
}

std::vector<FoldResult> cross_validate(const LabeledDataset& d, int k, const FitFn& fit, std::uint64_t seed) {
  if (d.rows() == 0) throw Error(Errc::EmptyDataset, "cross-validation on an empty dataset");
  const std::vector<int> folds = stratified_folds(d.labels, k, seed);
  std::vector<FoldResult> out;
  for (int f = 0; f < k; ++f) {
    std::vector<std::size_t> train_idx, test_idx;
    for (std::size_t i = 0; i < d.rows(); ++i) (folds[i] == f ? test_idx : train_idx).push_back(i);
    const LabeledDataset train = d.subset(train_idx);
    auto model = fit(train);
    if (!model) throw Error(Errc::InvalidInput, "fit function returned no model");

    FoldResult r;
    r.fold = f;
    r.train_rows = train_idx.size();
    r.test_rows = test_idx.size();
    for (std::size_t i : test_idx) {
      const Label p = model->predict(d.row(i));
      r.binary.add(d.labels[i], p);
      r.per_class.add(d.labels[i], p);
    }
    r.accuracy_pct = metrics::accuracy_pct(r.binary);
    if (r.binary.fp + r.binary.tn > 0) r.fpr = metrics::confusion_metrics(r.binary).fpr;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace sdnguard::ids
