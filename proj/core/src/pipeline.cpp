#include "simconf/pipeline.hpp"

#include <algorithm>
#include <limits>

#include <nlohmann/json.hpp>

#include "simconf/aggregate.hpp"
#include "simconf/error.hpp"
#include "simconf/features.hpp"
#include "simconf/parallel.hpp"
#include "simconf/rng.hpp"

namespace simconf {

using Json = nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kLearnerStream = 101;

const std::vector<std::string>& method_names() {
  static const std::vector<std::string> names = {
      "arith-agg", "bayes-beta",   "avg-logprob", "spec-ecc",
      "clf-gen",   "clf-pairs",    "clf-mean+gen", "clf-pairs+gen"};
  return names;
}

bool is_clf(const std::string& method) {
  return method.rfind("clf-", 0) == 0;
}

// Either a Bayes model or a classifier, whichever the method trains.
struct FittedModel {
  std::optional<BayesModel> bayes;
  std::optional<ForestModel> forest;
  std::optional<LogisticModel> logistic;
};

std::vector<const QueryGroup*> select_groups(const Corpus& corpus,
                                             const std::set<std::string>& ids) {
  std::vector<const QueryGroup*> out;
  for (const QueryGroup& g : corpus.groups)
    if (ids.count(g.query_id)) out.push_back(&g);
  return out;
}

const SimilarityMatrix& matrix_for(
    const std::map<std::string, SimilarityMatrix>& matrices,
    const QueryGroup& group) {
  const auto it = matrices.find(group.query_id);
  if (it == matrices.end())
    throw DataError("no similarity matrix for group '" + group.query_id + "'");
  if (it->second.m != group.samples.size())
    throw DataError("similarity matrix size mismatch for group '" +
                    group.query_id + "'");
  return it->second;
}

void require_fixed_group_size(const Corpus& corpus, const std::string& method) {
  std::size_t m = corpus.groups.front().samples.size();
  for (const QueryGroup& g : corpus.groups)
    if (g.samples.size() != m)
      throw DataError(method + " needs a fixed number of samples per group; "
                      "found " + std::to_string(m) + " and " +
                      std::to_string(g.samples.size()) + " (group '" +
                      g.query_id + "')");
}

int require_reward(const Sample& sample, const QueryGroup& group,
                   const char* split) {
  if (!sample.reward)
    throw DataError(std::string(split) + " sample without reward in group '" +
                    group.query_id + "' (run the reward step first)");
  return *sample.reward;
}

FittedModel fit_supervised(const std::string& method,
                           const std::vector<const QueryGroup*>& train,
                           const std::map<std::string, SimilarityMatrix>& mats,
                           const RunConfig& config, std::uint64_t split_seed) {
  if (train.empty())
    throw DataError("train split is empty; cannot fit " + method);

  FittedModel fitted;
  if (method == "bayes-beta") {
    std::vector<QueryGroup> groups;
    std::vector<SimilarityMatrix> matrices;
    for (const QueryGroup* g : train) {
      groups.push_back(*g);
      matrices.push_back(matrix_for(mats, *g));
    }
    fitted.bayes = fit_bayes(groups, matrices);
    return fitted;
  }

  // Classification: one training row per rewarded train sample.
  const FeatureSchema schema = schema_from_name(method);
  std::vector<FeatureVector> X;
  std::vector<int> y;
  static const SimilarityMatrix kNoMatrix;
  for (const QueryGroup* g : train) {
    const SimilarityMatrix& matrix =
        schema_uses_similarity(schema) ? matrix_for(mats, *g) : kNoMatrix;
    for (std::size_t i = 0; i < g->samples.size(); ++i) {
      y.push_back(require_reward(g->samples[i], *g, "train"));
      X.push_back(
          build_features(*g, matrix, i, schema, config.sorted_features));
    }
  }

  if (config.learner == "rf") {
    fitted.forest = fit_random_forest(
        X, y, config.forest, mix_seed(split_seed, kLearnerStream),
        config.jobs);
  } else if (config.learner == "logistic") {
    fitted.logistic = fit_logistic(X, y, config.logistic);
  } else {
    throw UsageError("unknown learner '" + config.learner +
                     "' (expected rf or logistic)");
  }
  return fitted;
}

double score_sample(const std::string& method, const FittedModel& fitted,
                    const QueryGroup& group, const SimilarityMatrix* matrix,
                    const std::vector<double>* group_spectral, std::size_t i,
                    const RunConfig& config) {
  if (method == "arith-agg") return mean_similarity_confidence(*matrix, i);
  if (method == "avg-logprob")
    return avg_logprob_confidence(group.samples[i]);
  if (method == "spec-ecc") return (*group_spectral)[i];
  if (method == "bayes-beta") {
    const std::vector<double> row = matrix->row_without_diagonal(i);
    return bayes_posterior(*fitted.bayes, row);
  }
  const FeatureSchema schema = schema_from_name(method);
  static const SimilarityMatrix kNoMatrix;
  const FeatureVector x =
      build_features(group, matrix ? *matrix : kNoMatrix, i, schema,
                     config.sorted_features);
  if (fitted.forest) return rf_predict_proba(*fitted.forest, x);
  return logistic_predict_proba(*fitted.logistic, x);
}

Json metrics_json(const EvaluationReport& report) {
  Json j;
  j["ats"] = report.ats;
  j["ace"] = report.ace;
  if (report.auroc)
    j["auroc"] = *report.auroc;
  else
    j["auroc"] = nullptr;
  return j;
}

}  // namespace

bool is_known_method(const std::string& method) {
  const auto& names = method_names();
  return std::find(names.begin(), names.end(), method) != names.end();
}

std::vector<std::string> known_methods() { return method_names(); }

bool method_is_supervised(const std::string& method) {
  return method == "bayes-beta" || is_clf(method);
}

bool method_uses_similarity(const std::string& method) {
  if (method == "avg-logprob" || method == "clf-gen") return false;
  return true;
}

RunOutput run_once(const Corpus& corpus,
                   const std::map<std::string, SimilarityMatrix>* matrices,
                   const RunConfig& config, std::uint64_t split_seed) {
  if (!is_known_method(config.method))
    throw UsageError("unknown method '" + config.method + "'");
  if (corpus.groups.empty()) throw DataError("corpus has no groups");
  if (config.method == "clf-pairs" || config.method == "clf-pairs+gen")
    require_fixed_group_size(corpus, config.method);

  const SplitAssignment split =
      split_train_test(corpus, config.split_fraction, split_seed);
  if (split.test_ids.empty())
    throw DataError("test split is empty (fraction too large)");

  // Similarity matrices for every group that needs one.
  std::map<std::string, SimilarityMatrix> computed;
  const std::map<std::string, SimilarityMatrix>* mats = matrices;
  if (method_uses_similarity(config.method) && matrices == nullptr) {
    std::vector<SimilarityMatrix> per_group(corpus.groups.size());
    parallel_for(corpus.groups.size(), config.jobs, [&](std::size_t g) {
      per_group[g] = similarity_matrix(corpus.groups[g], config.metric);
    });
    for (std::size_t g = 0; g < corpus.groups.size(); ++g)
      computed.emplace(corpus.groups[g].query_id, std::move(per_group[g]));
    mats = &computed;
  }

  RunOutput out;
  out.split_seed = split_seed;

  FittedModel fitted;
  if (method_is_supervised(config.method)) {
    const auto train = select_groups(corpus, split.train_ids);
    fitted = fit_supervised(config.method, train, mats ? *mats : computed,
                            config, split_seed);
    if (fitted.bayes) out.model_json = bayes_to_json(*fitted.bayes);
    if (fitted.forest) out.model_json = forest_to_json(*fitted.forest);
    if (fitted.logistic) out.model_json = logistic_to_json(*fitted.logistic);
  }

  // Score the evaluated samples of every test group.
  const auto test = select_groups(corpus, split.test_ids);
  std::vector<ScoredGroup> scored(test.size());
  parallel_for(test.size(), config.jobs, [&](std::size_t t) {
    const QueryGroup& group = *test[t];
    const SimilarityMatrix* matrix =
        method_uses_similarity(config.method) ? &matrix_for(*mats, group)
                                              : nullptr;
    std::vector<double> spectral;
    if (config.method == "spec-ecc")
      spectral = spectral_eccentricity_confidence(*matrix);

    ScoredGroup sg;
    sg.query_id = group.query_id;
    for (std::size_t i = 0; i < group.samples.size(); ++i) {
      const Sample& sample = group.samples[i];
      if (!sample.eval_flag) continue;
      ScoredSample ss;
      ss.position = i;
      ss.temperature = sample.temperature;
      ss.sample_index = sample.sample_index;
      ss.reward = require_reward(sample, group, "test");
      ss.confidence = score_sample(config.method, fitted, group, matrix,
                                   &spectral, i, config);
      sg.samples.push_back(ss);
    }
    if (sg.samples.empty())
      throw DataError("test group '" + group.query_id +
                      "' has no evaluated samples");
    scored[t] = std::move(sg);
  });

  for (const ScoredGroup& sg : scored)
    for (const ScoredSample& ss : sg.samples)
      out.scores.push_back(
          {sg.query_id, ss.sample_index, ss.temperature, ss.confidence});
  std::sort(out.scores.begin(), out.scores.end(),
            [](const ScoreRecord& a, const ScoreRecord& b) {
              return std::tie(a.query_id, a.temperature, a.sample_index) <
                     std::tie(b.query_id, b.temperature, b.sample_index);
            });

  out.report = make_report(config.method, scored, config.bin_count);
  out.scored = std::move(scored);
  return out;
}

RunSummary run_pipeline(const Corpus& corpus,
                        const std::map<std::string, SimilarityMatrix>* matrices,
                        const RunConfig& config) {
  if (config.repeats < 1) throw UsageError("repeats must be >= 1");

  RunSummary summary;
  for (int k = 0; k < config.repeats; ++k) {
    const std::uint64_t split_seed =
        mix_seed(config.seed, static_cast<std::uint64_t>(k));
    summary.runs.push_back(run_once(corpus, matrices, config, split_seed));
  }

  // Envelope: mean with min/max spread over the repeated splits.
  Json envelope;
  envelope["method"] = config.method;
  envelope["metric"] =
      method_uses_similarity(config.method) ? Json(config.metric) : Json();
  envelope["fraction"] = config.split_fraction;
  envelope["seed"] = config.seed;
  envelope["repeats"] = config.repeats;

  const auto aggregate = [&](auto get) -> Json {
    Json j;
    double sum = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const RunOutput& run : summary.runs) {
      const std::optional<double> v = get(run.report);
      if (!v) return Json();  // undefined in some run -> null
      sum += *v;
      lo = std::min(lo, *v);
      hi = std::max(hi, *v);
    }
    j["mean"] = sum / static_cast<double>(summary.runs.size());
    j["min"] = lo;
    j["max"] = hi;
    return j;
  };

  envelope["ats"] = aggregate(
      [](const EvaluationReport& r) { return std::optional<double>(r.ats); });
  envelope["ace"] = aggregate(
      [](const EvaluationReport& r) { return std::optional<double>(r.ace); });
  envelope["auroc"] =
      aggregate([](const EvaluationReport& r) { return r.auroc; });

  Json runs = Json::array();
  for (const RunOutput& run : summary.runs) {
    Json j = Json::parse(report_to_json(run.report));
    j["split_seed"] = run.split_seed;
    runs.push_back(std::move(j));
  }
  envelope["runs"] = std::move(runs);
  summary.report_json = envelope.dump(2);
  return summary;
}

std::vector<ScoredGroup> join_scores(const Corpus& corpus,
                                     const std::vector<ScoreRecord>& scores) {
  std::map<std::string, const QueryGroup*> by_id;
  for (const QueryGroup& g : corpus.groups) by_id[g.query_id] = &g;

  std::map<std::string, ScoredGroup> joined;
  for (const ScoreRecord& r : scores) {
    const auto it = by_id.find(r.query_id);
    if (it == by_id.end())
      throw DataError("scores reference unknown query '" + r.query_id + "'");
    const QueryGroup& group = *it->second;
    const Sample* found = nullptr;
    std::size_t position = 0;
    for (std::size_t i = 0; i < group.samples.size(); ++i) {
      const Sample& s = group.samples[i];
      if (s.sample_index == r.sample_index &&
          s.temperature == r.temperature) {
        found = &s;
        position = i;
        break;
      }
    }
    if (!found)
      throw DataError("scores reference unknown sample (query '" +
                      r.query_id + "', temperature " +
                      std::to_string(r.temperature) + ", index " +
                      std::to_string(r.sample_index) + ")");
    ScoredGroup& sg = joined[r.query_id];
    sg.query_id = r.query_id;
    ScoredSample ss;
    ss.position = position;
    ss.temperature = r.temperature;
    ss.sample_index = r.sample_index;
    ss.confidence = r.confidence;
    ss.reward = require_reward(*found, group, "scored");
    sg.samples.push_back(ss);
  }

  std::vector<ScoredGroup> out;
  out.reserve(joined.size());
  for (auto& [id, sg] : joined) {
    std::sort(sg.samples.begin(), sg.samples.end(),
              [](const ScoredSample& a, const ScoredSample& b) {
                return a.position < b.position;
              });
    out.push_back(std::move(sg));
  }
  return out;
}

}  // namespace simconf
