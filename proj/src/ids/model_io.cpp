#include "sdnguard/ids/model_io.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "sdnguard/error.hpp"
#include "sdnguard/ids/boosted.hpp"
#include "sdnguard/ids/ensemble.hpp"
#include "sdnguard/ids/external.hpp"
#include "sdnguard/ids/forest.hpp"

namespace sdnguard::ids {

using nlohmann::json;

namespace {

[[noreturn]] void corrupt(const std::string& why) { throw Error(Errc::CorruptModelFile, why); }

json nodes_json(const std::vector<TreeNode>& nodes) {
  json out = json::array();
  for (const auto& n : nodes) out.push_back({n.feature, n.threshold, n.left, n.right, n.leaf});
  return out;
}

std::vector<TreeNode> nodes_from(const json& j, std::size_t features, std::size_t leaves) {
  std::vector<TreeNode> nodes;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 5) corrupt("tree node must be [feature, threshold, left, right, leaf]");
    nodes.push_back({e[0].get<std::int32_t>(), e[1].get<double>(), e[2].get<std::int32_t>(), e[3].get<std::int32_t>(),
                     e[4].get<std::int32_t>()});
  }
  if (!validate_tree(nodes, features, leaves)) corrupt("tree structure is invalid");
  return nodes;
}

json normalizer_json(const NormalizationStats& s) {
  return {{"feature_names", s.feature_names}, {"mean", s.mean}, {"stddev", s.stddev}};
}

NormalizationStats normalizer_from(const json& j) {
  NormalizationStats s;
  s.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  s.mean = j.at("mean").get<std::vector<double>>();
  s.stddev = j.at("stddev").get<std::vector<double>>();
  if (s.mean.size() != s.size() || s.stddev.size() != s.size()) corrupt("normalizer arrays differ in length");
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!std::isfinite(s.mean[i]) || !std::isfinite(s.stddev[i]) || s.stddev[i] < 0.0) {
      corrupt("normalizer holds a non-finite or negative entry");
    }
  }
  return s;
}

json probs_json(const ClassProbabilities& p) { return p.p; }

ClassProbabilities probs_from(const json& j) {
  ClassProbabilities p;
  if (!j.is_array() || j.size() != kNumLabels) corrupt("class distribution needs 8 entries");
  for (std::size_t k = 0; k < kNumLabels; ++k) {
    p.p[k] = j[k].get<double>();
    if (!std::isfinite(p.p[k]) || p.p[k] < 0.0) corrupt("class distribution entry out of range");
  }
  return p;
}

json forest_params_json(const ForestParams& p) {
  return {{"n_trees", p.n_trees},     {"max_depth", p.max_depth}, {"min_leaf", p.min_leaf},
          {"feature_fraction", p.feature_fraction}, {"bootstrap", p.bootstrap},
          {"max_bins", p.max_bins},   {"seed", p.seed}};
}

json boosted_params_json(const BoostedParams& p) {
  return {{"stages", p.stages},
          {"learning_rate", p.learning_rate},
          {"max_depth", p.max_depth},
          {"lambda", p.lambda},
          {"gamma", p.gamma},
          {"min_child_weight", p.min_child_weight},
          {"row_subsample", p.row_subsample},
          {"col_subsample", p.col_subsample},
          {"max_bins", p.max_bins},
          {"seed", p.seed},
          {"variant", p.variant}};
}

json body_json(const Classifier& m);

json envelope(const Classifier& m) {
  return {{"kind", m.kind()}, {"feature_schema", m.feature_names()}, {"model", body_json(m)}};
}

json body_json(const Classifier& m) {
  if (const auto* f = dynamic_cast<const ForestModel*>(&m)) {
    json trees = json::array();
    for (const auto& t : f->trees()) {
      json counts = json::array();
      for (const auto& c : t.leaf_counts()) counts.push_back(c);
      trees.push_back({{"nodes", nodes_json(t.nodes())}, {"leaf_counts", counts}});
    }
    return {{"params", forest_params_json(f->params())}, {"trees", trees}};
  }
  if (const auto* b = dynamic_cast<const BoostedModel*>(&m)) {
    json classes = json::array();
    for (Label l : b->classes()) classes.push_back(label_name(l));
    json stages = json::array();
    for (const auto& s : b->stages()) {
      json trees = json::array();
      for (const auto& t : s.trees) trees.push_back({{"nodes", nodes_json(t.nodes())}, {"leaf_values", t.leaf_values()}});
      stages.push_back({{"weight", s.weight}, {"trees", trees}});
    }
    return {{"params", boosted_params_json(b->params())},
            {"classes", classes},
            {"offsets", b->offsets()},
            {"stages", stages},
            {"loss_history", b->loss_history()}};
  }
  if (const auto* t = dynamic_cast<const ExternalTableModel*>(&m)) {
    json rows = json::array();
    for (const auto& r : t->table()) rows.push_back({{"point", r.point}, {"probs", probs_json(r.probs)}});
    return {{"id", t->id()}, {"table", rows}};
  }
  if (const auto* e = dynamic_cast<const Ensemble*>(&m)) {
    json members = json::array();
    for (std::size_t i = 0; i < e->members().size(); ++i) {
      members.push_back({{"weight", e->members()[i].weight}, {"model", envelope(*e->members()[i].model)}});
    }
    return {{"mode", fusion_mode_name(e->mode())}, {"theta", e->theta()}, {"members", members}};
  }
  throw Error(Errc::SerializationFailure, "models of kind '" + std::string(m.kind()) + "' cannot be saved");
}

std::shared_ptr<const Classifier> model_from(const json& env) {
  const auto kind = env.at("kind").get<std::string>();
  const auto features = env.at("feature_schema").get<std::vector<std::string>>();
  if (features.empty()) corrupt("empty feature schema");
  const json& body = env.at("model");
  const std::size_t d = features.size();

  if (kind == "forest") {
    const json& jp = body.at("params");
    ForestParams p;
    p.n_trees = jp.at("n_trees").get<int>();
    p.max_depth = jp.at("max_depth").get<int>();
    p.min_leaf = jp.at("min_leaf").get<double>();
    p.feature_fraction = jp.at("feature_fraction").get<double>();
    p.bootstrap = jp.at("bootstrap").get<bool>();
    p.max_bins = jp.at("max_bins").get<std::size_t>();
    p.seed = jp.at("seed").get<std::uint64_t>();
    std::vector<ClassificationTree> trees;
    for (const auto& jt : body.at("trees")) {
      std::vector<ClassCounts> counts;
      for (const auto& jc : jt.at("leaf_counts")) counts.push_back(probs_from(jc).p);
      trees.emplace_back(nodes_from(jt.at("nodes"), d, counts.size()), std::move(counts));
    }
    if (trees.empty()) corrupt("forest without trees");
    return std::make_shared<ForestModel>(features, p, std::move(trees));
  }
  if (kind == "boosted") {
    const json& jp = body.at("params");
    BoostedParams p;
    p.stages = jp.at("stages").get<int>();
    p.learning_rate = jp.at("learning_rate").get<double>();
    p.max_depth = jp.at("max_depth").get<int>();
    p.lambda = jp.at("lambda").get<double>();
    p.gamma = jp.at("gamma").get<double>();
    p.min_child_weight = jp.at("min_child_weight").get<double>();
    p.row_subsample = jp.at("row_subsample").get<double>();
    p.col_subsample = jp.at("col_subsample").get<double>();
    p.max_bins = jp.at("max_bins").get<std::size_t>();
    p.seed = jp.at("seed").get<std::uint64_t>();
    p.variant = jp.at("variant").get<std::string>();
    std::vector<Label> classes;
    for (const auto& jc : body.at("classes")) {
      auto l = parse_label(jc.get<std::string>());
      if (!l) corrupt("unknown class " + jc.dump());
      classes.push_back(*l);
    }
    auto offsets = body.at("offsets").get<std::vector<double>>();
    std::vector<BoostStage> stages;
    for (const auto& js : body.at("stages")) {
      BoostStage s;
      s.weight = js.at("weight").get<double>();
      for (const auto& jt : js.at("trees")) {
        auto values = jt.at("leaf_values").get<std::vector<double>>();
        for (double v : values) {
          if (!std::isfinite(v)) corrupt("non-finite leaf value");
        }
        auto nodes = nodes_from(jt.at("nodes"), d, values.size());
        s.trees.emplace_back(std::move(nodes), std::move(values));
      }
      if (s.trees.size() != classes.size()) corrupt("stage tree count differs from class count");
      stages.push_back(std::move(s));
    }
    if (classes.empty() || offsets.size() != classes.size()) corrupt("boosted model needs one offset per class");
    return std::make_shared<BoostedModel>(features, p, std::move(classes), std::move(offsets), std::move(stages),
                                          body.at("loss_history").get<std::vector<double>>());
  }
  if (kind == "external-table") {
    std::vector<TablePrototype> rows;
    for (const auto& jr : body.at("table")) {
      TablePrototype r;
      r.point = jr.at("point").get<std::vector<double>>();
      if (r.point.size() != d) corrupt("prototype width differs from the feature schema");
      r.probs = probs_from(jr.at("probs"));
      rows.push_back(std::move(r));
    }
    if (rows.empty()) corrupt("empty external table");
    return std::make_shared<ExternalTableModel>(body.at("id").get<std::string>(), features, std::move(rows));
  }
  if (kind == "ensemble") {
    auto mode = parse_fusion_mode(body.at("mode").get<std::string>());
    if (!mode) corrupt("unknown fusion mode");
    std::vector<EnsembleMember> members;
    for (const auto& jm : body.at("members")) {
      auto member = model_from(jm.at("model"));
      if (member->feature_names() != features) {
        throw Error(Errc::SchemaMismatch, "ensemble member schema differs from the envelope");
      }
      members.push_back({member, jm.at("weight").get<double>()});
    }
    if (members.empty()) corrupt("ensemble without members");
    return std::make_shared<Ensemble>(std::move(members), *mode, body.at("theta").get<double>());
  }
  corrupt("unknown model kind '" + kind + "'");
}

}  // namespace

std::string model_to_json(const Classifier& model, const std::optional<NormalizationStats>& normalizer,
                          std::string_view config_hash) {
  json j{{"format", "sdnguard-model"}, {"schema_version", kModelSchemaVersion}};
  if (!config_hash.empty()) j["config_hash"] = config_hash;
  j.update(envelope(model));
  j["normalizer"] = normalizer ? normalizer_json(*normalizer) : json(nullptr);
  return j.dump() + "\n";
}

void save_model(const std::string& path, const Classifier& model, const std::optional<NormalizationStats>& normalizer,
                std::string_view config_hash) {
  const std::string text = model_to_json(model, normalizer, config_hash);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error(Errc::IoFailure, "cannot write " + path);
}

ModelBundle model_from_json(std::string_view text) {
  ModelBundle b;
  try {
    const json j = json::parse(text);
    if (j.value("format", "") != "sdnguard-model") corrupt("not a model file");
    if (j.at("schema_version").get<int>() != kModelSchemaVersion) {
      corrupt("unsupported schema_version " + j.at("schema_version").dump());
    }
    b.model = model_from(j);
    if (!j.at("normalizer").is_null()) {
      b.normalizer = normalizer_from(j.at("normalizer"));
      if (b.normalizer->feature_names != b.model->feature_names()) {
        throw Error(Errc::SchemaMismatch, "normalizer schema differs from the model's");
      }
    }
  } catch (const json::exception& e) {
    corrupt(e.what());
  } catch (const Error& e) {
    if (e.code() == Errc::SchemaMismatch || e.code() == Errc::CorruptModelFile) throw;
    corrupt(e.what());
  }
  return b;
}

ModelBundle load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

}  // namespace sdnguard::ids
