#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sdnguard/labels.hpp"

namespace sdnguard::ids {

// Common surface of every scoring model. Implementations are immutable after
// construction, so one instance may be shared across threads.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual std::string_view kind() const noexcept = 0;
  virtual const std::vector<std::string>& feature_names() const noexcept = 0;

  // Throws SchemaMismatch when x does not match feature_names().
  virtual ClassProbabilities predict_proba(std::span<const double> x) const = 0;

  Label predict(std::span<const double> x) const { return argmax_label(predict_proba(x)); }
};

void check_schema(const Classifier& model, std::span<const double> x);

}  // namespace sdnguard::ids
