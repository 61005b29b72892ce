#include "simconf/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "simconf/error.hpp"
#include "simconf/parallel.hpp"
#include "simconf/rng.hpp"

namespace simconf {

using Json = nlohmann::ordered_json;

namespace {

void validate_training_data(const std::vector<FeatureVector>& X,
                            const std::vector<int>& y) {
  if (X.size() != y.size())
    throw UsageError("training features and labels differ in length");
  if (X.size() < 2) throw DataError("need at least 2 training rows");
  const std::size_t d = X.front().values.size();
  if (d == 0) throw UsageError("training rows must have at least 1 feature");
  for (const FeatureVector& row : X)
    if (row.values.size() != d)
      throw UsageError("ragged training features (rows differ in length)");
  bool has_pos = false, has_neg = false;
  for (const int label : y) {
    if (label != 0 && label != 1) throw UsageError("labels must be 0 or 1");
    (label == 1 ? has_pos : has_neg) = true;
  }
  if (!has_pos) throw DataError("single-class training data: no positives");
  if (!has_neg) throw DataError("single-class training data: no negatives");
}

double gini_cost(double count, double pos) {
  if (count <= 0.0) return 0.0;
  const double p = pos / count;
  return count * 2.0 * p * (1.0 - p);
}

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<FeatureVector>& X, const std::vector<int>& y,
              const ForestParams& params, Rng rng)
      : X_(X), y_(y), params_(params), rng_(rng) {
    d_ = X.front().values.size();
    subset_size_ = static_cast<std::size_t>(
        std::ceil(std::sqrt(static_cast<double>(d_))));
  }

  DecisionTree build() {
    // Bootstrap resample, n draws with replacement.
    const std::size_t n = X_.size();
    std::vector<std::size_t> indices;
    indices.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      indices.push_back(static_cast<std::size_t>(rng_.below(n)));
    build_node(std::move(indices), 0);
    return std::move(tree_);
  }

 private:
  int make_leaf(const std::vector<std::size_t>& indices) {
    std::size_t pos = 0;
    for (const std::size_t i : indices) pos += static_cast<std::size_t>(y_[i]);
    TreeNode node;
    node.leaf_value =
        static_cast<double>(pos) / static_cast<double>(indices.size());
    tree_.nodes.push_back(node);
    return static_cast<int>(tree_.nodes.size() - 1);
  }

  std::vector<int> sample_feature_subset() {
    std::vector<int> features(d_);
    std::iota(features.begin(), features.end(), 0);
    for (std::size_t i = 0; i < subset_size_ && i + 1 < d_; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng_.below(d_ - i));
      std::swap(features[i], features[j]);
    }
    features.resize(std::min(subset_size_, d_));
    std::sort(features.begin(), features.end());
    return features;
  }

  int build_node(std::vector<std::size_t> indices, int depth) {
    const std::size_t count = indices.size();
    std::size_t pos = 0;
    for (const std::size_t i : indices) pos += static_cast<std::size_t>(y_[i]);
    const bool pure = pos == 0 || pos == count;

    if (depth >= params_.max_depth || pure ||
        count < 2 * static_cast<std::size_t>(params_.min_leaf)) {
      return make_leaf(indices);
    }

    // Greedy split: minimize summed child Gini over the feature subset;
    // candidate thresholds are midpoints between consecutive distinct
    // values. Features scan in ascending order, so ties go to the first.
    int best_feature = -1;
    double best_threshold = 0.0;
    double best_cost = std::numeric_limits<double>::infinity();

    std::vector<std::pair<double, int>> column(count);
    for (const int f : sample_feature_subset()) {
      for (std::size_t k = 0; k < count; ++k)
        column[k] = {X_[indices[k]].values[static_cast<std::size_t>(f)],
                     y_[indices[k]]};
      std::sort(column.begin(), column.end());
      if (column.front().first == column.back().first) continue;

      double left_count = 0.0, left_pos = 0.0;
      const double total = static_cast<double>(count);
      const double total_pos = static_cast<double>(pos);
      for (std::size_t k = 0; k + 1 < count; ++k) {
        left_count += 1.0;
        left_pos += column[k].second;
        if (column[k].first == column[k + 1].first) continue;
        const double right_count = total - left_count;
        if (left_count < params_.min_leaf || right_count < params_.min_leaf)
          continue;
        const double cost = gini_cost(left_count, left_pos) +
                            gini_cost(right_count, total_pos - left_pos);
        if (cost < best_cost) {
          best_cost = cost;
          best_feature = f;
          best_threshold = 0.5 * (column[k].first + column[k + 1].first);
        }
      }
    }

    if (best_feature < 0) return make_leaf(indices);

    std::vector<std::size_t> left, right;
    for (const std::size_t i : indices) {
      if (X_[i].values[static_cast<std::size_t>(best_feature)] <=
          best_threshold)
        left.push_back(i);
      else
        right.push_back(i);
    }
    if (left.empty() || right.empty()) return make_leaf(indices);

    TreeNode node;
    node.feature = best_feature;
    node.threshold = best_threshold;
    tree_.nodes.push_back(node);
    const int id = static_cast<int>(tree_.nodes.size() - 1);
    indices.clear();
    indices.shrink_to_fit();
    const int left_id = build_node(std::move(left), depth + 1);
    const int right_id = build_node(std::move(right), depth + 1);
    tree_.nodes[static_cast<std::size_t>(id)].left = left_id;
    tree_.nodes[static_cast<std::size_t>(id)].right = right_id;
    return id;
  }

  const std::vector<FeatureVector>& X_;
  const std::vector<int>& y_;
  const ForestParams& params_;
  Rng rng_;
  std::size_t d_ = 0;
  std::size_t subset_size_ = 0;
  DecisionTree tree_;
};

Json node_to_json(const DecisionTree& tree, int id) {
  const TreeNode& node = tree.nodes[static_cast<std::size_t>(id)];
  Json j;
  if (node.is_leaf()) {
    j["leaf"] = Json{{"p", node.leaf_value}};
  } else {
    Json split;
    split["feature"] = node.feature;
    split["threshold"] = node.threshold;
    split["left"] = node_to_json(tree, node.left);
    split["right"] = node_to_json(tree, node.right);
    j["split"] = std::move(split);
  }
  return j;
}

int node_from_json(const Json& j, DecisionTree& tree,
                   std::size_t feature_count) {
  TreeNode node;
  if (j.contains("leaf")) {
    node.leaf_value = j["leaf"].at("p").get<double>();
    if (!(node.leaf_value >= 0.0 && node.leaf_value <= 1.0))
      throw DataError("forest_from_json: leaf fraction out of [0,1]");
    tree.nodes.push_back(node);
    return static_cast<int>(tree.nodes.size() - 1);
  }
  const Json& split = j.at("split");
  node.feature = split.at("feature").get<int>();
  node.threshold = split.at("threshold").get<double>();
  if (node.feature < 0 ||
      static_cast<std::size_t>(node.feature) >= feature_count)
    throw DataError("forest_from_json: split feature out of range");
  tree.nodes.push_back(node);
  const int id = static_cast<int>(tree.nodes.size() - 1);
  const int left = node_from_json(split.at("left"), tree, feature_count);
  const int right = node_from_json(split.at("right"), tree, feature_count);
  tree.nodes[static_cast<std::size_t>(id)].left = left;
  tree.nodes[static_cast<std::size_t>(id)].right = right;
  return id;
}

}  // namespace

ForestModel fit_random_forest(const std::vector<FeatureVector>& X,
                              const std::vector<int>& y,
                              const ForestParams& params, std::uint64_t seed,
                              unsigned jobs) {
  validate_training_data(X, y);
  if (params.tree_count < 1 || params.max_depth < 1 || params.min_leaf < 1)
    throw UsageError("forest params must be positive");

  ForestModel model;
  model.params = params;
  model.seed = seed;
  model.feature_count = X.front().values.size();
  model.trees.resize(static_cast<std::size_t>(params.tree_count));

  parallel_for(model.trees.size(), jobs, [&](std::size_t t) {
    TreeBuilder builder(X, y, params, Rng(mix_seed(seed, t)));
    model.trees[t] = builder.build();
  });
  return model;
}

double rf_predict_proba(const ForestModel& model, const FeatureVector& x) {
  if (x.values.size() != model.feature_count)
    throw DataError("rf_predict_proba: feature length " +
                    std::to_string(x.values.size()) + " != trained " +
                    std::to_string(model.feature_count));
  double sum = 0.0;
  for (const DecisionTree& tree : model.trees) {
    int id = 0;
    for (;;) {
      const TreeNode& node = tree.nodes[static_cast<std::size_t>(id)];
      if (node.is_leaf()) {
        sum += node.leaf_value;
        break;
      }
      id = x.values[static_cast<std::size_t>(node.feature)] <= node.threshold
               ? node.left
               : node.right;
    }
  }
  return sum / static_cast<double>(model.trees.size());
}

std::string forest_to_json(const ForestModel& model) {
  Json j;
  j["format"] = "simconf-rf/1";
  j["params"] = Json{{"tree_count", model.params.tree_count},
                     {"max_depth", model.params.max_depth},
                     {"min_leaf", model.params.min_leaf}};
  j["seed"] = model.seed;
  j["feature_count"] = model.feature_count;
  Json trees = Json::array();
  for (const DecisionTree& tree : model.trees)
    trees.push_back(node_to_json(tree, 0));
  j["trees"] = std::move(trees);
  return j.dump(2);
}

ForestModel forest_from_json(const std::string& text) {
  ForestModel model;
  try {
    const Json j = Json::parse(text);
    if (j.value("format", "") != std::string("simconf-rf/1"))
      throw DataError("forest_from_json: unknown model format");
    model.params.tree_count = j.at("params").at("tree_count").get<int>();
    model.params.max_depth = j.at("params").at("max_depth").get<int>();
    model.params.min_leaf = j.at("params").at("min_leaf").get<int>();
    model.seed = j.at("seed").get<std::uint64_t>();
    model.feature_count = j.at("feature_count").get<std::size_t>();
    for (const Json& t : j.at("trees")) {
      DecisionTree tree;
      node_from_json(t, tree, model.feature_count);
      model.trees.push_back(std::move(tree));
    }
  } catch (const Json::exception& e) {
    throw DataError(std::string("forest_from_json: ") + e.what());
  }
  if (model.trees.empty()) throw DataError("forest_from_json: no trees");
  return model;
}

}  // namespace simconf
