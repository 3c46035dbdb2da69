#pragma once

#include <string>

#include <json.hpp>

#include "tune/forest.hpp"

namespace tune {

//! Versioned JSON snapshot of a trained forest, nodes as flat arrays.
inline nlohmann::json forest_to_json(const ForestModel& model) {
  nlohmann::json doc;
  doc["format_version"] = 1;
  doc["feature_count"] = model.feature_count;
  doc["class_labels"] = model.class_labels;
  doc["hyperparams"] = {{"n_estimators", model.hyperparams.n_estimators},
                        {"max_features", model.hyperparams.max_features},
                        {"max_depth", model.hyperparams.max_depth},
                        {"criterion", criterion_name(model.hyperparams.criterion)}};
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& tree : model.trees) {
    nlohmann::json t;
    auto& feature = t["feature"] = nlohmann::json::array();
    auto& threshold = t["threshold"] = nlohmann::json::array();
    auto& left = t["left"] = nlohmann::json::array();
    auto& right = t["right"] = nlohmann::json::array();
    auto& label = t["label"] = nlohmann::json::array();
    for (const auto& n : tree.nodes) {
      feature.push_back(n.feature);
      threshold.push_back(n.threshold);
      left.push_back(n.left);
      right.push_back(n.right);
      label.push_back(n.label);
    }
    t["counts"] = tree.counts;
    trees.push_back(std::move(t));
  }
  doc["trees"] = std::move(trees);
  return doc;
}

inline ForestModel forest_from_json(const nlohmann::json& doc) {
  if (doc.at("format_version").get<int>() != 1)
    fail(errc::parse_error, "unsupported forest format version");
  ForestModel model;
  model.feature_count = doc.at("feature_count").get<std::size_t>();
  model.class_labels = doc.at("class_labels").get<std::vector<std::string>>();
  const auto& hp = doc.at("hyperparams");
  model.hyperparams.n_estimators = hp.at("n_estimators").get<int>();
  model.hyperparams.max_features = hp.at("max_features").get<int>();
  model.hyperparams.max_depth = hp.at("max_depth").get<int>();
  model.hyperparams.criterion = criterion_from_string(hp.at("criterion").get<std::string>());
  for (const auto& t : doc.at("trees")) {
    DecisionTree tree;
    tree.n_classes = model.class_labels.size();
    auto feature = t.at("feature").get<std::vector<std::int32_t>>();
    auto threshold = t.at("threshold").get<std::vector<double>>();
    auto left = t.at("left").get<std::vector<std::int32_t>>();
    auto right = t.at("right").get<std::vector<std::int32_t>>();
    auto label = t.at("label").get<std::vector<std::int32_t>>();
    tree.counts = t.at("counts").get<std::vector<std::int64_t>>();
    tree.nodes.resize(feature.size());
    for (std::size_t i = 0; i < feature.size(); ++i)
      tree.nodes[i] = TreeNode{threshold[i], feature[i], left[i], right[i], label[i]};
    model.trees.push_back(std::move(tree));
  }
  return model;
}

} // namespace tune
