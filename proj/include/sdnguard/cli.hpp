#pragma once

#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

#include "sdnguard/dataset.hpp"
#include "sdnguard/ids/boosted.hpp"
#include "sdnguard/ids/ensemble.hpp"
#include "sdnguard/ids/forest.hpp"
#include "sdnguard/ledger/latency.hpp"
#include "sdnguard/ledger/ledger.hpp"
#include "sdnguard/policy.hpp"

namespace sdnguard::cli {

// Everything a run depends on. Its hash stamps every artifact.
struct RunConfig {
  std::string dataset;
  std::string schema;  // optional CSV column mapping
  std::string model;
  std::string scenario;
  std::string out = "out";

  std::string kind = "ensemble";  // forest | boosted | cat | ensemble
  ids::ForestParams forest;
  ids::BoostedParams boosted;
  // Ensemble member weights in the order forest, boosted, cat.
  std::vector<double> ensemble_weights{0.5, 0.3, 0.2};
  ids::FusionMode fusion = ids::FusionMode::Soft;
  double theta = 0.5;
  double tau = 5.0;
  double active_timeout = 0.5;
  int folds = 5;

  policy::PolicyConfig policy;
  ledger::LedgerConfig ledger;
  ledger::LatencyModelConfig latency;
  std::uint64_t seed = 1;
};

nlohmann::json to_json(const RunConfig& c);
// Overlays the members present in `j` onto `base`.
RunConfig overlay(RunConfig base, const nlohmann::json& j);
RunConfig load_run_config(const std::string& path, RunConfig base);
// First 16 hex digits of SHA-256 over the compact JSON form. The output
// directory is left out so relocated runs keep their hash.
std::string hash_document(const nlohmann::json& doc);
std::string config_hash(const RunConfig& c);

// Trains c.kind on an already normalized dataset: a forest, a boosted model
// (variant "xgb"), its "cat" variant (different seed, row and column
// subsampling), or the soft/hard ensemble of all three weighted by
// c.ensemble_weights.
std::shared_ptr<const ids::Classifier> train_model(const LabeledDataset& normalized, const RunConfig& c);

// Entry point of the `sdnguard` binary. Returns the process exit status:
// 0 success, 1 data or verification failure, 2 usage error.
int run_cli(int argc, char** argv);

}  // namespace sdnguard::cli
