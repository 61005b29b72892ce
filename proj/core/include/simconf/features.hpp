#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "simconf/corpus.hpp"
#include "simconf/similarity.hpp"

namespace simconf {

// Feature layouts for aggregation by classification.
//   kGen       -> [generative score]
//   kPairs     -> pairwise similarity row (m-1 values, canonical order)
//   kMeanGen   -> [mean similarity, generative score]
//   kPairsGen  -> pairwise row followed by the generative score
enum class FeatureSchema { kGen, kPairs, kMeanGen, kPairsGen };

FeatureSchema schema_from_name(const std::string& name);  // "clf-pairs" etc.
const char* schema_name(FeatureSchema schema);

bool schema_uses_similarity(FeatureSchema schema);
bool schema_uses_gen_score(FeatureSchema schema);
bool schema_uses_pairwise(FeatureSchema schema);

// Feature dimension for a group of size m.
std::size_t schema_feature_count(FeatureSchema schema, std::size_t m);

struct FeatureVector {
  std::vector<double> values;
  FeatureSchema schema = FeatureSchema::kPairs;
};

// Features for sample i of a group. Pairwise similarities keep canonical
// (temperature, sample_index) neighbor order unless `sorted_pairs`, which
// sorts them descending for a permutation-invariant layout. Schemas that
// need the generative score raise DataError when avg_logprob is missing.
FeatureVector build_features(const QueryGroup& group,
                             const SimilarityMatrix& matrix, std::size_t i,
                             FeatureSchema schema, bool sorted_pairs = false);

}  // namespace simconf
