#pragma once

#include <span>
#include <vector>

#include "sdnguard/flow_engine.hpp"
#include "sdnguard/ids/ensemble.hpp"

namespace sdnguard::ids {

struct PipelineRun {
  std::vector<FusedDecision> decisions;
  double seconds = 0.0;  // wall clock of featurize -> normalize -> predict -> fuse
};

// Scores every flow in order on the calling thread.
PipelineRun score_flows(const Ensemble& ensemble, const NormalizationStats& stats,
                        std::span<const FlowState> flows);

}  // namespace sdnguard::ids
