#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "simconf/corpus.hpp"
#include "simconf/evaluate.hpp"
#include "simconf/forest.hpp"
#include "simconf/logistic.hpp"
#include "simconf/similarity.hpp"

namespace simconf {

// Confidence methods exposed on the command line.
//   unsupervised: arith-agg | avg-logprob | spec-ecc
//   supervised:   bayes-beta | clf-gen | clf-pairs | clf-mean+gen |
//                 clf-pairs+gen
bool is_known_method(const std::string& method);
std::vector<std::string> known_methods();
bool method_is_supervised(const std::string& method);
bool method_uses_similarity(const std::string& method);

struct RunConfig {
  std::string method = "arith-agg";
  std::string metric = "jaccard";
  double split_fraction = 0.5;
  std::uint64_t seed = 0;  // master seed; every derived stream funnels here
  int repeats = 1;
  std::string learner = "rf";  // rf | logistic, for clf-* methods
  ForestParams forest;
  LogisticParams logistic;
  bool sorted_features = false;
  unsigned jobs = 1;
  std::size_t bin_count = kDefaultBinCount;
};

// One train/score/evaluate round on a single split.
struct RunOutput {
  std::uint64_t split_seed = 0;
  std::vector<ScoreRecord> scores;      // test-split evaluated samples
  std::vector<ScoredGroup> scored;      // same data with rewards attached
  EvaluationReport report;
  std::string model_json;               // empty for unsupervised methods
};

// Supervised methods fit on the train split only; everything is scored on
// the test split. `matrices` supplies precomputed similarity matrices
// (e.g. a simulate sidecar) keyed by query_id; when null they are computed
// from sample texts with config.metric.
RunOutput run_once(const Corpus& corpus,
                   const std::map<std::string, SimilarityMatrix>* matrices,
                   const RunConfig& config, std::uint64_t split_seed);

struct RunSummary {
  std::vector<RunOutput> runs;
  std::string report_json;  // envelope with mean/min/max over repeats
};

// Repeat k runs on the split seeded by stream k of the master seed.
RunSummary run_pipeline(const Corpus& corpus,
                        const std::map<std::string, SimilarityMatrix>* matrices,
                        const RunConfig& config);

// Joins an external scores file against a rewarded corpus for evaluation
// via make_report. Every scored sample must resolve to a rewarded sample.
std::vector<ScoredGroup> join_scores(const Corpus& corpus,
                                     const std::vector<ScoreRecord>& scores);

}  // namespace simconf
