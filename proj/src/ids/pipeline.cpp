#include "sdnguard/ids/pipeline.hpp"

#include <array>
#include <chrono>

#include "sdnguard/error.hpp"

namespace sdnguard::ids {

PipelineRun score_flows(const Ensemble& ensemble, const NormalizationStats& stats,
                        std::span<const FlowState> flows) {
  if (stats.feature_names != FeatureVector::names() || ensemble.feature_names() != stats.feature_names) {
    throw Error(Errc::SchemaMismatch, "pipeline expects the flow feature schema");
  }
  PipelineRun run;
  run.decisions.resize(flows.size());
  std::array<double, FeatureVector::kSize> z{};
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < flows.size(); ++i) {
    const auto raw = extract_features(flows[i]).values();
    normalize_into(raw, stats, z);
    run.decisions[i] = ensemble.classify(z);
  }
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return run;
}

}  // namespace sdnguard::ids
