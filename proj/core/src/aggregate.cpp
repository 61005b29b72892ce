#include "simconf/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "simconf/eigen.hpp"
#include "simconf/error.hpp"

namespace simconf {

using Json = nlohmann::ordered_json;

namespace {

constexpr double kClampEps = 1e-4;
constexpr double kEigenvalueKeepThreshold = 0.9;

double clamp_unit(double s) {
  return std::min(1.0 - kClampEps, std::max(kClampEps, s));
}

void check_model(const BayesModel& model) {
  if (!(model.p0 > 0.0 && model.p0 < 1.0))
    throw UsageError("BayesModel: p0 must lie strictly in (0, 1)");
  if (!(model.a_pos > 0.0 && model.b_pos > 0.0 && model.a_neg > 0.0 &&
        model.b_neg > 0.0))
    throw UsageError("BayesModel: Beta parameters must be positive");
}

double log_beta_norm(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Sum of Beta log-densities over clamped similarities.
double log_density_sum(std::span<const double> sims, double a, double b,
                       double log_norm) {
  double sum = 0.0;
  for (const double s : sims) {
    const double x = clamp_unit(s);
    sum += (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_norm;
  }
  return sum;
}

std::pair<double, double> fit_beta_with_retry(std::vector<double> values,
                                              const char* label) {
  try {
    return fit_beta_mom(values);
  } catch (const ZeroVarianceError&) {
    // Deterministic widening: alternate +/-eps, then retry once.
    for (std::size_t j = 0; j < values.size(); ++j)
      values[j] += (j % 2 == 0 ? kClampEps : -kClampEps);
    try {
      return fit_beta_mom(std::move(values));
    } catch (const ZeroVarianceError&) {
      throw NumericError(std::string("fit_bayes: ") + label +
                         " similarities are degenerate even after jitter");
    }
  }
}

}  // namespace

std::string bayes_to_json(const BayesModel& model) {
  Json j;
  j["format"] = "simconf-bayes/1";
  j["p0"] = model.p0;
  j["a_pos"] = model.a_pos;
  j["b_pos"] = model.b_pos;
  j["a_neg"] = model.a_neg;
  j["b_neg"] = model.b_neg;
  return j.dump(2);
}

BayesModel bayes_from_json(const std::string& text) {
  BayesModel model;
  try {
    const Json j = Json::parse(text);
    if (j.value("format", "") != std::string("simconf-bayes/1"))
      throw DataError("bayes_from_json: unknown model format");
    model.p0 = j.at("p0").get<double>();
    model.a_pos = j.at("a_pos").get<double>();
    model.b_pos = j.at("b_pos").get<double>();
    model.a_neg = j.at("a_neg").get<double>();
    model.b_neg = j.at("b_neg").get<double>();
  } catch (const Json::exception& e) {
    throw DataError(std::string("bayes_from_json: ") + e.what());
  }
  check_model(model);
  return model;
}

double mean_similarity_confidence(const SimilarityMatrix& matrix,
                                  std::size_t i) {
  if (matrix.m < 2)
    throw UsageError("mean_similarity_confidence: need at least 2 samples");
  if (i >= matrix.m)
    throw UsageError("mean_similarity_confidence: sample index out of range");
  double sum = 0.0;
  for (std::size_t j = 0; j < matrix.m; ++j)
    if (j != i) sum += matrix.at(i, j);
  return sum / static_cast<double>(matrix.m - 1);
}

std::pair<double, double> fit_beta_mom(std::vector<double> values) {
  if (values.size() < 2)
    throw DataError("fit_beta_mom: need at least 2 values");
  for (double& v : values) v = clamp_unit(v);

  const double n = static_cast<double>(values.size());
  const double mean =
      std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (const double v : values) ss += (v - mean) * (v - mean);
  const double variance = ss / (n - 1.0);
  if (variance <= 0.0)
    throw ZeroVarianceError("fit_beta_mom: values have zero variance");

  const double k = mean * (1.0 - mean) / variance - 1.0;
  if (k <= 0.0) return {1.0, 1.0};
  return {mean * k, (1.0 - mean) * k};
}

BayesModel fit_bayes(const std::vector<QueryGroup>& train_groups,
                     const std::vector<SimilarityMatrix>& matrices) {
  if (train_groups.size() != matrices.size())
    throw UsageError("fit_bayes: one similarity matrix per group required");

  std::size_t correct = 0, total = 0;
  std::vector<double> pos_sims, neg_sims;
  for (std::size_t g = 0; g < train_groups.size(); ++g) {
    const QueryGroup& group = train_groups[g];
    const SimilarityMatrix& matrix = matrices[g];
    const std::size_t m = group.samples.size();
    if (matrix.m != m)
      throw UsageError("fit_bayes: matrix size mismatch for group '" +
                       group.query_id + "'");
    for (std::size_t i = 0; i < m; ++i) {
      const Sample& sample = group.samples[i];
      if (!sample.reward)
        throw DataError("fit_bayes: sample without reward in group '" +
                        group.query_id + "'");
      ++total;
      auto& sink = (*sample.reward == 1) ? pos_sims : neg_sims;
      if (*sample.reward == 1) ++correct;
      for (std::size_t k = 0; k < m; ++k)
        if (k != i) sink.push_back(matrix.at(i, k));
    }
  }

  if (correct == 0)
    throw DataError("fit_bayes: training data has no correct samples");
  if (correct == total)
    throw DataError("fit_bayes: training data has no incorrect samples");

  BayesModel model;
  model.p0 = static_cast<double>(correct) / static_cast<double>(total);
  std::tie(model.a_pos, model.b_pos) =
      fit_beta_with_retry(std::move(pos_sims), "correct-class");
  std::tie(model.a_neg, model.b_neg) =
      fit_beta_with_retry(std::move(neg_sims), "incorrect-class");
  check_model(model);
  return model;
}

double bayes_posterior(const BayesModel& model, std::span<const double> sims) {
  check_model(model);
  if (sims.empty())
    throw UsageError("bayes_posterior: similarity list must be non-empty");

  const double log_norm_pos = log_beta_norm(model.a_pos, model.b_pos);
  const double log_norm_neg = log_beta_norm(model.a_neg, model.b_neg);
  const double log_alpha =
      log_density_sum(sims, model.a_pos, model.b_pos, log_norm_pos);
  const double log_beta =
      log_density_sum(sims, model.a_neg, model.b_neg, log_norm_neg);

  // posterior = 1 / (1 + exp(z)) with z the log odds against correctness.
  const double z = std::log1p(-model.p0) + log_beta -
                   std::log(model.p0) - log_alpha;
  if (z > 700.0) return 0.0;
  const double posterior = 1.0 / (1.0 + std::exp(z));
  return posterior;
}

double avg_logprob_confidence(const Sample& sample) {
  if (!sample.avg_logprob)
    throw DataError("avg_logprob_confidence: sample has no avg_logprob");
  if (*sample.avg_logprob > 0.0)
    throw DataError("avg_logprob_confidence: avg_logprob must be <= 0");
  return std::exp(*sample.avg_logprob);
}

std::vector<double> spectral_eccentricity_confidence(
    const SimilarityMatrix& matrix) {
  const std::size_t m = matrix.m;
  if (m < 2)
    throw UsageError("spectral_eccentricity_confidence: need m >= 2");

  // Degrees are >= 1 because the diagonal is 1, so the normalization is
  // always defined.
  std::vector<double> inv_sqrt_degree(m);
  for (std::size_t i = 0; i < m; ++i) {
    double d = 0.0;
    for (std::size_t j = 0; j < m; ++j) d += matrix.at(i, j);
    inv_sqrt_degree[i] = 1.0 / std::sqrt(d);
  }

  std::vector<double> laplacian(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      const double w =
          matrix.at(i, j) * inv_sqrt_degree[i] * inv_sqrt_degree[j];
      const double value = (i == j ? 1.0 : 0.0) - w;
      laplacian[i * m + j] = value;
      laplacian[j * m + i] = value;
    }
  }

  const SymmetricEigen eigen = symmetric_eigen(laplacian, m);

  std::vector<std::size_t> kept;
  for (std::size_t k = 0; k < m; ++k)
    if (eigen.eigenvalues[k] < kEigenvalueKeepThreshold) kept.push_back(k);
  // Eigenvalue 0 always exists for the normalized Laplacian, so kept is
  // never empty.

  std::vector<double> centroid(kept.size(), 0.0);
  for (std::size_t c = 0; c < kept.size(); ++c) {
    for (std::size_t j = 0; j < m; ++j)
      centroid[c] += eigen.vector_entry(j, kept[c]);
    centroid[c] /= static_cast<double>(m);
  }

  std::vector<double> confidences(m);
  for (std::size_t j = 0; j < m; ++j) {
    double dist2 = 0.0;
    for (std::size_t c = 0; c < kept.size(); ++c) {
      const double delta = eigen.vector_entry(j, kept[c]) - centroid[c];
      dist2 += delta * delta;
    }
    confidences[j] = 1.0 / (1.0 + std::sqrt(dist2));
  }
  return confidences;
}

}  // namespace simconf
