#pragma once

#include <string>
#include <vector>

#include "simconf/features.hpp"

namespace simconf {

struct LogisticParams {
  double l2 = 1e-3;       // ridge strength on weights (bias unregularized)
  double step = 0.1;      // fixed gradient-descent step
  int max_iters = 5000;
  double tol = 1e-6;      // stop when gradient norm drops below this
};

// Weights apply to standardized features; mean/stddev are the training-set
// statistics stored for prediction.
struct LogisticModel {
  std::vector<double> weights;
  double bias = 0.0;
  std::vector<double> mean;
  std::vector<double> stddev;
};

// Mean negative log-likelihood plus (l2/2)*||w||^2 on rows of X as given
// (no standardization). Exposed so the gradient can be checked against
// finite differences of this exact function.
double logistic_loss(const std::vector<FeatureVector>& X,
                     const std::vector<int>& y,
                     const std::vector<double>& weights, double bias,
                     double l2);

// Gradient of logistic_loss; grad_weights is resized to match.
void logistic_gradient(const std::vector<FeatureVector>& X,
                       const std::vector<int>& y,
                       const std::vector<double>& weights, double bias,
                       double l2, std::vector<double>& grad_weights,
                       double& grad_bias);

// Full-batch gradient descent on internally standardized features.
LogisticModel fit_logistic(const std::vector<FeatureVector>& X,
                           const std::vector<int>& y,
                           const LogisticParams& params);

// Sigmoid of the standardized affine score, in (0, 1).
double logistic_predict_proba(const LogisticModel& model,
                              const FeatureVector& x);

std::string logistic_to_json(const LogisticModel& model);
LogisticModel logistic_from_json(const std::string& text);

}  // namespace simconf
