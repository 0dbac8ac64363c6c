#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "sdnguard/flow_engine.hpp"
#include "sdnguard/ids/classifier.hpp"

namespace sdnguard::ids {

inline constexpr int kModelSchemaVersion = 1;

struct ModelBundle {
  std::shared_ptr<const Classifier> model;
  std::optional<NormalizationStats> normalizer;
};

// JSON envelope:
//   {"format": "sdnguard-model", "schema_version": 1, "kind": ...,
//    "feature_schema": [...], "normalizer": {...} | null, "model": {...}}
// Forests, boosted models, external tables and ensembles of those are
// supported; an ExternalModel (a bare function) raises SerializationFailure.
// A non-empty config_hash is recorded as "config_hash".
std::string model_to_json(const Classifier& model, const std::optional<NormalizationStats>& normalizer,
                          std::string_view config_hash = {});
void save_model(const std::string& path, const Classifier& model,
                const std::optional<NormalizationStats>& normalizer = std::nullopt,
                std::string_view config_hash = {});

// CorruptModelFile on malformed or structurally invalid content,
// SchemaMismatch when a normalizer or member disagrees with the envelope's
// feature schema.
ModelBundle model_from_json(std::string_view text);
ModelBundle load_model(const std::string& path);

}  // namespace sdnguard::ids
