#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "simconf/corpus.hpp"
#include "simconf/similarity.hpp"

namespace simconf {

// Five-parameter Bayesian evidence model: prior probability of correctness
// plus Beta-distributed similarity conditionals for the correct and
// incorrect classes.
struct BayesModel {
  double p0 = 0.5;     // prior P(correct), strictly inside (0,1)
  double a_pos = 1.0;  // Beta params of similarities given correct
  double b_pos = 1.0;
  double a_neg = 1.0;  // Beta params of similarities given incorrect
  double b_neg = 1.0;
};

std::string bayes_to_json(const BayesModel& model);
BayesModel bayes_from_json(const std::string& text);

// Arithmetic mean of row i excluding the diagonal. Equals the graph-degree
// score (rowsum - 1)/(m - 1).
double mean_similarity_confidence(const SimilarityMatrix& matrix,
                                  std::size_t i);

// Method-of-moments Beta fit. Values are clamped to [eps, 1-eps] with
// eps = 1e-4 before fitting; needs >= 2 values and nonzero variance.
// When the implied concentration is non-positive falls back to Beta(1,1).
std::pair<double, double> fit_beta_mom(std::vector<double> values);

// Learns the 5 parameters from rewarded training groups: p0 by counting,
// the conditionals by fit_beta_mom over all pairwise similarities grouped
// by the (correctness of the) row sample. Zero-variance fits are retried
// once with an alternating +/-eps jitter.
BayesModel fit_bayes(const std::vector<QueryGroup>& train_groups,
                     const std::vector<SimilarityMatrix>& matrices);

// Posterior P(correct | similarities): p0 * prod BetaPDF(s; pos) over
// (p0 * prod pos + (1-p0) * prod neg), evaluated with log densities.
double bayes_posterior(const BayesModel& model, std::span<const double> sims);

// exp(avg_logprob); DataError when the sample carries no avg_logprob.
double avg_logprob_confidence(const Sample& sample);

// Spectral eccentricity over the symmetric-normalized graph Laplacian
// L = I - D^{-1/2} W D^{-1/2}. Eigenvectors with eigenvalue < 0.9 form the
// embedding; confidence_j = 1 / (1 + distance of sample j from the
// embedding centroid).
std::vector<double> spectral_eccentricity_confidence(
    const SimilarityMatrix& matrix);

}  // namespace simconf
