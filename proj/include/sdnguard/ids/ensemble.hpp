#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sdnguard/ids/classifier.hpp"

namespace sdnguard::ids {

enum class FusionMode {
  Soft,  // argmax_c sum_m w_m * P_m(c|x)
  Hard,  // each member casts w_m on its own argmax label
};

std::string_view fusion_mode_name(FusionMode m) noexcept;
std::optional<FusionMode> parse_fusion_mode(std::string_view text);

struct EnsembleConfig {
  std::vector<double> weights;  // one per member, rescaled to sum 1
  FusionMode mode = FusionMode::Soft;
  double theta = 0.5;
};

// Rescales to sum 1. Throws InvalidConfig on negative entries or zero sum.
std::vector<double> normalize_weights(std::span<const double> raw);

// Per-class fused mass; a simplex in both modes.
ClassProbabilities fused_scores(std::span<const ClassProbabilities> per_model,
                                std::span<const double> weights, FusionMode mode);

struct FusedDecision {
  Label label = Label::Normal;
  double score = 0.0;
};

// Weights are normalized here. Ties resolve by severity rank.
FusedDecision fuse(std::span<const ClassProbabilities> per_model, const EnsembleConfig& cfg);

struct Alert {
  std::string flow_id;
  Label label = Label::Normal;
  double confidence = 0.0;
  double timestamp = 0.0;
};

// Alert iff the label is an attack and score > theta (strict).
std::optional<Alert> decide(const FusedDecision& fused, double theta, std::string flow_id,
                            double now);

struct EnsembleMember {
  std::shared_ptr<const Classifier> model;
  double weight = 1.0;
};

class Ensemble final : public Classifier {
 public:
  Ensemble(std::vector<EnsembleMember> members, FusionMode mode = FusionMode::Soft,
           double theta = 0.5);

  std::string_view kind() const noexcept override { return "ensemble"; }
  const std::vector<std::string>& feature_names() const noexcept override;
  ClassProbabilities predict_proba(std::span<const double> x) const override;

  FusedDecision classify(std::span<const double> x) const;

  const std::vector<EnsembleMember>& members() const noexcept { return members_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  FusionMode mode() const noexcept { return mode_; }
  double theta() const noexcept { return theta_; }
  EnsembleConfig config() const { return {weights_, mode_, theta_}; }

 private:
  std::vector<EnsembleMember> members_;
  std::vector<double> weights_;
  FusionMode mode_;
  double theta_;
};

}  // namespace sdnguard::ids
