#include <algorithm>
#include <cmath>
#include <numeric>

#include "rolefinder/errors.hpp"
#include "rolefinder/learner.hpp"
#include "rolefinder/seed.hpp"

namespace rolefinder {

ClassWeights balanced_class_weights(std::span<const int> labels) {
  const double n = static_cast<double>(labels.size());
  const double pos = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
  const double neg = n - pos;
  if (pos == 0.0 || neg == 0.0) throw ValidationError("single-class dataset");
  return {n / (2.0 * neg), n / (2.0 * pos)};
}

std::size_t LabeledDataset::positives() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
}

void LabeledDataset::validate() const {
  if (rows.size() != labels.size()) throw ValidationError("dataset rows and labels differ in length");
  if (!ids.empty() && ids.size() != rows.size()) throw ValidationError("dataset ids and rows differ in length");
  const std::size_t d = dimension();
  for (const auto& r : rows) {
    if (r.size() != d) throw ValidationError("ragged dataset rows");
    for (double v : r) {
      if (!std::isfinite(v)) throw ValidationError("non-finite feature value");
    }
  }
  for (int y : labels) {
    if (y != 0 && y != 1) throw ValidationError("labels must be 0 or 1");
  }
  if (!(weights.negative > 0.0) || !(weights.positive > 0.0)) {
    throw ValidationError("class weights must be positive");
  }
}

LabeledDataset make_dataset(std::vector<Row> rows, std::vector<int> labels, std::vector<std::string> ids) {
  LabeledDataset d{std::move(rows), std::move(labels), std::move(ids), {}};
  d.weights = balanced_class_weights(d.labels);
  d.validate();
  return d;
}

void TrainingConfig::validate() const {
  if (!(alpha > 0.0)) throw ValidationError("alpha must be positive");
  if (!(beta > 0.0 && beta < 0.5)) throw ValidationError("beta must lie in (0, 0.5)");
  if (folds < 1 || smote_neighbors < 1 || epochs < 1) {
    throw ValidationError("folds, smote_neighbors and epochs must be positive");
  }
  if (!(learning_rate > 0.0)) throw ValidationError("learning rate must be positive");
  if (!(tolerance >= 0.0)) throw ValidationError("tolerance must be non-negative");
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double logistic_loss(double p, int y) {
  p = std::clamp(p, kProbabilityEpsilon, 1.0 - kProbabilityEpsilon);
  return y ? -std::log(p) : -std::log1p(-p);
}

double weighted_mean_loss(std::span<const double> probabilities, std::span<const int> labels,
                          ClassWeights weights) {
  if (probabilities.size() != labels.size() || labels.empty()) {
    throw ValidationError("weighted loss: size mismatch or empty input");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double w = weights.of(labels[i]);
    num += w * logistic_loss(probabilities[i], labels[i]);
    den += w;
  }
  return num / den;
}

double LogisticModel::decision(std::span<const double> row) const {
  if (row.size() != weights.size()) throw ValidationError("row dimension does not match model");
  double z = bias;
  for (std::size_t j = 0; j < row.size(); ++j) z += weights[j] * row[j];
  return z;
}

double LogisticModel::predict_proba(std::span<const double> row) const { return sigmoid(decision(row)); }

double weighted_logistic_loss(const LabeledDataset& data, const LogisticModel& model) {
  if (data.positives() == 0 || data.negatives() == 0) throw ValidationError("single-class dataset");
  std::vector<double> p;
  p.reserve(data.size());
  for (const auto& r : data.rows) p.push_back(model.predict_proba(r));
  return weighted_mean_loss(p, data.labels, data.weights);
}

namespace {

double dot_plus(std::span<const double> w, std::span<const double> x, double b) {
  double z = b;
  for (std::size_t j = 0; j < x.size(); ++j) z += w[j] * x[j];
  return z;
}

double squared_norm(std::span<const double> w) {
  return std::inner_product(w.begin(), w.end(), w.begin(), 0.0);
}

double total_weight(const LabeledDataset& data) {
  double s = 0.0;
  for (int y : data.labels) s += data.weights.of(y);
  return s;
}

}  // namespace

double objective(const LabeledDataset& data, std::span<const double> w, double b, double alpha) {
  double num = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double p = sigmoid(dot_plus(w, data.rows[i], b));
    num += data.weights.of(data.labels[i]) * logistic_loss(p, data.labels[i]);
  }
  return num / total_weight(data) + 0.5 * alpha * squared_norm(w);
}

void objective_gradient(const LabeledDataset& data, std::span<const double> w, double b, double alpha,
                        std::span<double> grad_w, double& grad_b) {
  const double norm = total_weight(data);
  std::fill(grad_w.begin(), grad_w.end(), 0.0);
  grad_b = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& x = data.rows[i];
    const double err = data.weights.of(data.labels[i]) *
                       (sigmoid(dot_plus(w, x, b)) - data.labels[i]) / norm;
    for (std::size_t j = 0; j < x.size(); ++j) grad_w[j] += err * x[j];
    grad_b += err;
  }
  for (std::size_t j = 0; j < w.size(); ++j) grad_w[j] += alpha * w[j];
}

LogisticModel fit_sgd(const LabeledDataset& data, const TrainingConfig& config) {
  config.validate();
  data.validate();
  if (data.positives() == 0 || data.negatives() == 0) throw ValidationError("single-class dataset");

  const std::size_t n = data.size();
  const std::size_t d = data.dimension();
  const double mean_weight = total_weight(data) / static_cast<double>(n);

  LogisticModel m;
  m.weights.assign(d, 0.0);
  m.alpha = config.alpha;
  m.seed = config.seed;
  m.learning_rate = config.learning_rate;
  m.initial_objective = objective(data, m.weights, m.bias, config.alpha);

  Rng rng(config.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  double previous = m.initial_objective;
  double t = 0.0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);
    for (std::size_t idx : order) {
      const auto& x = data.rows[idx];
      const int y = data.labels[idx];
      const double eta = config.learning_rate / (1.0 + config.learning_rate * config.alpha * t);
      const double err = data.weights.of(y) / mean_weight * (sigmoid(dot_plus(m.weights, x, m.bias)) - y);
      for (std::size_t j = 0; j < d; ++j) m.weights[j] -= eta * (err * x[j] + config.alpha * m.weights[j]);
      m.bias -= eta * err;
      t += 1.0;
    }
    ++m.epochs_run;
    const double current = objective(data, m.weights, m.bias, config.alpha);
    m.final_objective = current;
    if (previous - current < config.tolerance) break;
    previous = current;
  }
  return m;
}

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw ValidationError("roc_auc: size mismatch");
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Mid-ranks handle ties.
  std::vector<double> rank(scores.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && scores[idx[j + 1]] == scores[idx[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = mid;
    i = j + 1;
  }
  double pos = 0.0;
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i]) {
      pos += 1.0;
      rank_sum += rank[i];
    }
  }
  const double neg = static_cast<double>(labels.size()) - pos;
  if (pos == 0.0 || neg == 0.0) throw ValidationError("roc_auc needs both classes");
  return (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

}  // namespace rolefinder
