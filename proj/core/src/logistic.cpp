#include "simconf/logistic.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "simconf/error.hpp"

namespace simconf {

using Json = nlohmann::ordered_json;

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(t)) without overflow.
double softplus(double t) { return t > 30.0 ? t : std::log1p(std::exp(t)); }

void validate_rows(const std::vector<FeatureVector>& X,
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

double norm(const std::vector<double>& w, double b) {
  double s = b * b;
  for (const double v : w) s += v * v;
  return std::sqrt(s);
}

}  // namespace

double logistic_loss(const std::vector<FeatureVector>& X,
                     const std::vector<int>& y,
                     const std::vector<double>& weights, double bias,
                     double l2) {
  const double n = static_cast<double>(X.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    double z = bias;
    for (std::size_t j = 0; j < weights.size(); ++j)
      z += weights[j] * X[i].values[j];
    // y=1 contributes log(1+exp(-z)), y=0 contributes log(1+exp(z)).
    loss += y[i] == 1 ? softplus(-z) : softplus(z);
  }
  loss /= n;
  double reg = 0.0;
  for (const double w : weights) reg += w * w;
  return loss + 0.5 * l2 * reg;
}

void logistic_gradient(const std::vector<FeatureVector>& X,
                       const std::vector<int>& y,
                       const std::vector<double>& weights, double bias,
                       double l2, std::vector<double>& grad_weights,
                       double& grad_bias) {
  const double n = static_cast<double>(X.size());
  grad_weights.assign(weights.size(), 0.0);
  grad_bias = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    double z = bias;
    for (std::size_t j = 0; j < weights.size(); ++j)
      z += weights[j] * X[i].values[j];
    const double residual = sigmoid(z) - static_cast<double>(y[i]);
    grad_bias += residual;
    for (std::size_t j = 0; j < weights.size(); ++j)
      grad_weights[j] += residual * X[i].values[j];
  }
  grad_bias /= n;
  for (std::size_t j = 0; j < weights.size(); ++j)
    grad_weights[j] = grad_weights[j] / n + l2 * weights[j];
}

LogisticModel fit_logistic(const std::vector<FeatureVector>& X,
                           const std::vector<int>& y,
                           const LogisticParams& params) {
  validate_rows(X, y);
  const std::size_t n = X.size();
  const std::size_t d = X.front().values.size();

  LogisticModel model;
  model.mean.assign(d, 0.0);
  model.stddev.assign(d, 1.0);
  for (const FeatureVector& row : X)
    for (std::size_t j = 0; j < d; ++j) model.mean[j] += row.values[j];
  for (std::size_t j = 0; j < d; ++j)
    model.mean[j] /= static_cast<double>(n);
  std::vector<double> var(d, 0.0);
  for (const FeatureVector& row : X)
    for (std::size_t j = 0; j < d; ++j) {
      const double delta = row.values[j] - model.mean[j];
      var[j] += delta * delta;
    }
  for (std::size_t j = 0; j < d; ++j) {
    const double s = std::sqrt(var[j] / static_cast<double>(n));
    model.stddev[j] = s > 0.0 ? s : 1.0;  // constant feature centers to 0
  }

  std::vector<FeatureVector> Z(n);
  for (std::size_t i = 0; i < n; ++i) {
    Z[i].schema = X[i].schema;
    Z[i].values.resize(d);
    for (std::size_t j = 0; j < d; ++j)
      Z[i].values[j] = (X[i].values[j] - model.mean[j]) / model.stddev[j];
  }

  model.weights.assign(d, 0.0);
  model.bias = 0.0;
  std::vector<double> grad(d, 0.0);
  double grad_bias = 0.0;
  for (int iter = 0; iter < params.max_iters; ++iter) {
    logistic_gradient(Z, y, model.weights, model.bias, params.l2, grad,
                      grad_bias);
    if (norm(grad, grad_bias) < params.tol) break;
    for (std::size_t j = 0; j < d; ++j)
      model.weights[j] -= params.step * grad[j];
    model.bias -= params.step * grad_bias;
  }

  for (const double w : model.weights)
    if (!std::isfinite(w))
      throw NumericError("fit_logistic: weights diverged");
  if (!std::isfinite(model.bias))
    throw NumericError("fit_logistic: bias diverged");
  return model;
}

double logistic_predict_proba(const LogisticModel& model,
                              const FeatureVector& x) {
  if (x.values.size() != model.weights.size())
    throw DataError("logistic_predict_proba: feature length " +
                    std::to_string(x.values.size()) + " != trained " +
                    std::to_string(model.weights.size()));
  double z = model.bias;
  for (std::size_t j = 0; j < model.weights.size(); ++j)
    z += model.weights[j] * (x.values[j] - model.mean[j]) / model.stddev[j];
  const double p = sigmoid(z);
  // sigmoid is strictly inside (0,1) for finite z; clamp the saturated case.
  return std::min(1.0 - 1e-15, std::max(1e-15, p));
}

std::string logistic_to_json(const LogisticModel& model) {
  Json j;
  j["format"] = "simconf-logistic/1";
  j["weights"] = model.weights;
  j["bias"] = model.bias;
  j["mean"] = model.mean;
  j["stddev"] = model.stddev;
  return j.dump(2);
}

LogisticModel logistic_from_json(const std::string& text) {
  LogisticModel model;
  try {
    const Json j = Json::parse(text);
    if (j.value("format", "") != std::string("simconf-logistic/1"))
      throw DataError("logistic_from_json: unknown model format");
    model.weights = j.at("weights").get<std::vector<double>>();
    model.bias = j.at("bias").get<double>();
    model.mean = j.at("mean").get<std::vector<double>>();
    model.stddev = j.at("stddev").get<std::vector<double>>();
  } catch (const Json::exception& e) {
    throw DataError(std::string("logistic_from_json: ") + e.what());
  }
  if (model.mean.size() != model.weights.size() ||
      model.stddev.size() != model.weights.size())
    throw DataError("logistic_from_json: inconsistent dimensions");
  return model;
}

}  // namespace simconf
