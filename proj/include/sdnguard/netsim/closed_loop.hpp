#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "sdnguard/dataset.hpp"
#include "sdnguard/flow_engine.hpp"
#include "sdnguard/ids/ensemble.hpp"
#include "sdnguard/ledger/ledger.hpp"
#include "sdnguard/netsim/event_log.hpp"
#include "sdnguard/netsim/scenario.hpp"
#include "sdnguard/netsim/traffic.hpp"
#include "sdnguard/policy.hpp"

namespace sdnguard::netsim {

// Scores one exported flow; receives the raw 12-feature vector.
struct Detector {
  std::string name;
  std::function<ids::FusedDecision(const FlowState&, const FeatureVector&)> score;
};

// Reports the flow's ground-truth label with the given confidence.
Detector perfect_detector(double confidence = 1.0);
// Always Normal.
Detector never_alert_detector();
// Normalizes with `stats`, then fuses the ensemble members.
Detector ensemble_detector(std::shared_ptr<const ids::Ensemble> ensemble, NormalizationStats stats);

struct LoopConfig {
  policy::PolicyConfig policy;
  ledger::LedgerConfig ledger;  // ledger.theta is also the alert threshold
  std::string identity = "ids-0";
  std::uint64_t identity_seed = 1;
};

struct DetectionRecord {
  double ts = 0.0;
  std::string flow_id;
  Label truth = Label::Normal;
  Label predicted = Label::Normal;
  double score = 0.0;
};

struct ClosedLoopResult {
  EventLog log;
  std::vector<ledger::Block> chain;
  ledger::KeyRegistry registry;
  std::vector<DetectionRecord> detections;
  LabeledDataset flows;  // raw features of every scored flow with its true label
  std::vector<std::string> warnings;
  std::uint64_t offered_packets = 0;
  std::uint64_t offered_bytes = 0;
  double end_time = 0.0;
};

// Packet arrivals feed both the flow table (mirror port) and the switch.
// Exported flows are scored serially at inference_ms each; an alert is
// logged, mapped through severity and the policy table to a rule (when
// enforcement is on and the pair is consistent), installed with the sampled
// latency, sealed and submitted to the ledger. Blocks are cut on every tick.
// At the end arrivals stop, the table is flushed, queues drain and pending
// transactions are committed.
ClosedLoopResult run_closed_loop(const ScenarioConfig& cfg, const Trace& trace, const Detector& detector,
                                 const LoopConfig& loop = {});
ClosedLoopResult run_closed_loop(const ScenarioConfig& cfg, const Detector& detector,
                                 const LoopConfig& loop = {});

}  // namespace sdnguard::netsim
