#include "sdnguard/ids/ensemble.hpp"

#include <cmath>

#include "sdnguard/error.hpp"

namespace sdnguard::ids {

std::string_view fusion_mode_name(FusionMode m) noexcept {
  return m == FusionMode::Soft ? "soft" : "hard";
}

std::optional<FusionMode> parse_fusion_mode(std::string_view text) {
  if (text == "soft") return FusionMode::Soft;
  if (text == "hard") return FusionMode::Hard;
  return std::nullopt;
}

std::vector<double> normalize_weights(std::span<const double> raw) {
  double total = 0.0;
  for (double w : raw) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw Error(Errc::InvalidConfig, "ensemble weights must be >= 0");
    total += w;
  }
  if (!(total > 0.0)) throw Error(Errc::InvalidConfig, "ensemble weights sum to zero");
  std::vector<double> out(raw.begin(), raw.end());
  for (double& w : out) w /= total;
  return out;
}

ClassProbabilities fused_scores(std::span<const ClassProbabilities> per_model,
                                std::span<const double> weights, FusionMode mode) {
  if (per_model.empty()) throw Error(Errc::EmptyEnsemble, "no member outputs to fuse");
  if (weights.size() != per_model.size()) {
    throw Error(Errc::InvalidInput, "fusion needs one weight per member");
  }
  ClassProbabilities out;
  if (mode == FusionMode::Soft) {
    for (std::size_t c = 0; c < kNumLabels; ++c) {
      double s = 0.0;
      for (std::size_t m = 0; m < per_model.size(); ++m) s += weights[m] * per_model[m].p[c];
      out.p[c] = s;
    }
  } else {
    for (std::size_t m = 0; m < per_model.size(); ++m) {
      out[argmax_label(per_model[m])] += weights[m];
    }
  }
  return out;
}

FusedDecision fuse(std::span<const ClassProbabilities> per_model, const EnsembleConfig& cfg) {
  if (per_model.empty()) throw Error(Errc::EmptyEnsemble, "no member outputs to fuse");
  const auto w = normalize_weights(cfg.weights);
  const auto scores = fused_scores(per_model, w, cfg.mode);
  const Label label = argmax_label(scores);
  return {label, scores[label]};
}

std::optional<Alert> decide(const FusedDecision& fused, double theta, std::string flow_id,
                            double now) {
  if (!is_attack(fused.label) || !(fused.score > theta)) return std::nullopt;
  return Alert{std::move(flow_id), fused.label, fused.score, now};
}

Ensemble::Ensemble(std::vector<EnsembleMember> members, FusionMode mode, double theta)
    : members_(std::move(members)), mode_(mode), theta_(theta) {
  if (members_.empty()) throw Error(Errc::EmptyEnsemble, "ensemble has no members");
  if (!(theta_ >= 0.0 && theta_ <= 1.0)) throw Error(Errc::InvalidConfig, "theta must be in [0,1]");
  std::vector<double> raw;
  for (const auto& m : members_) {
    if (!m.model) throw Error(Errc::InvalidInput, "ensemble member without a model");
    if (m.model->feature_names() != members_.front().model->feature_names()) {
      throw Error(Errc::SchemaMismatch, "ensemble members disagree on the feature schema");
    }
    raw.push_back(m.weight);
  }
  weights_ = normalize_weights(raw);
}

const std::vector<std::string>& Ensemble::feature_names() const noexcept {
  return members_.front().model->feature_names();
}

ClassProbabilities Ensemble::predict_proba(std::span<const double> x) const {
  check_schema(*this, x);
  ClassProbabilities per_model[16];
  std::vector<ClassProbabilities> spill;
  std::span<ClassProbabilities> outputs;
  if (members_.size() <= 16) {
    outputs = std::span<ClassProbabilities>(per_model, members_.size());
  } else {
    spill.resize(members_.size());
    outputs = spill;
  }
  for (std::size_t m = 0; m < members_.size(); ++m) outputs[m] = members_[m].model->predict_proba(x);
  return fused_scores(outputs, weights_, mode_);
}

FusedDecision Ensemble::classify(std::span<const double> x) const {
  const auto scores = predict_proba(x);
  const Label label = argmax_label(scores);
  return {label, scores[label]};
}

}  // namespace sdnguard::ids
