#include "simconf/features.hpp"

#include <algorithm>
#include <functional>

#include "simconf/aggregate.hpp"
#include "simconf/error.hpp"

namespace simconf {

FeatureSchema schema_from_name(const std::string& name) {
  if (name == "clf-gen") return FeatureSchema::kGen;
  if (name == "clf-pairs") return FeatureSchema::kPairs;
  if (name == "clf-mean+gen") return FeatureSchema::kMeanGen;
  if (name == "clf-pairs+gen") return FeatureSchema::kPairsGen;
  throw UsageError("unknown feature schema '" + name + "'");
}

const char* schema_name(FeatureSchema schema) {
  switch (schema) {
    case FeatureSchema::kGen: return "clf-gen";
    case FeatureSchema::kPairs: return "clf-pairs";
    case FeatureSchema::kMeanGen: return "clf-mean+gen";
    case FeatureSchema::kPairsGen: return "clf-pairs+gen";
  }
  return "clf-pairs";
}

bool schema_uses_similarity(FeatureSchema schema) {
  return schema != FeatureSchema::kGen;
}

bool schema_uses_gen_score(FeatureSchema schema) {
  return schema != FeatureSchema::kPairs;
}

bool schema_uses_pairwise(FeatureSchema schema) {
  return schema == FeatureSchema::kPairs || schema == FeatureSchema::kPairsGen;
}

std::size_t schema_feature_count(FeatureSchema schema, std::size_t m) {
  switch (schema) {
    case FeatureSchema::kGen: return 1;
    case FeatureSchema::kPairs: return m - 1;
    case FeatureSchema::kMeanGen: return 2;
    case FeatureSchema::kPairsGen: return m;
  }
  return 0;
}

FeatureVector build_features(const QueryGroup& group,
                             const SimilarityMatrix& matrix, std::size_t i,
                             FeatureSchema schema, bool sorted_pairs) {
  const std::size_t m = group.samples.size();
  if (i >= m) throw UsageError("build_features: sample index out of range");
  if (schema_uses_similarity(schema) && matrix.m != m)
    throw DataError("build_features: matrix size does not match group '" +
                    group.query_id + "'");

  FeatureVector fv;
  fv.schema = schema;

  if (schema_uses_pairwise(schema)) {
    fv.values = matrix.row_without_diagonal(i);
    if (sorted_pairs)
      std::sort(fv.values.begin(), fv.values.end(), std::greater<double>());
  } else if (schema == FeatureSchema::kMeanGen) {
    fv.values.push_back(mean_similarity_confidence(matrix, i));
  }

  if (schema_uses_gen_score(schema)) {
    const Sample& sample = group.samples[i];
    if (!sample.avg_logprob)
      throw DataError("build_features: schema " +
                      std::string(schema_name(schema)) +
                      " needs avg_logprob, missing on sample " +
                      std::to_string(i) + " of group '" + group.query_id +
                      "'");
    fv.values.push_back(avg_logprob_confidence(sample));
  }
  return fv;
}

}  // namespace simconf
