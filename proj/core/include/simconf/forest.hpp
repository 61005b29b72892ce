#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "simconf/features.hpp"

namespace simconf {

struct ForestParams {
  int tree_count = 100;
  int max_depth = 4;
  int min_leaf = 1;
};

// Flat node storage; feature < 0 marks a leaf carrying the positive-class
// fraction. Node 0 is the root.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double leaf_value = 0.0;

  bool is_leaf() const { return feature < 0; }
};

struct DecisionTree {
  std::vector<TreeNode> nodes;
};

struct ForestModel {
  ForestParams params;
  std::uint64_t seed = 0;
  std::size_t feature_count = 0;
  std::vector<DecisionTree> trees;
};

// Bagged trees with greedy Gini splits over ceil(sqrt(d)) random features
// per node. Each tree draws from an independent stream derived from `seed`,
// so the model is identical for any `jobs`.
ForestModel fit_random_forest(const std::vector<FeatureVector>& X,
                              const std::vector<int>& y,
                              const ForestParams& params, std::uint64_t seed,
                              unsigned jobs = 1);

// Mean over trees of the reached leaf's positive fraction.
double rf_predict_proba(const ForestModel& model, const FeatureVector& x);

// Versioned JSON with trees as nested split/leaf nodes.
std::string forest_to_json(const ForestModel& model);
ForestModel forest_from_json(const std::string& text);

}  // namespace simconf
