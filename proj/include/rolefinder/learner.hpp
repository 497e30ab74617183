#pragma once

// L2-regularized logistic regression trained by SGD, class-weighted logistic
// loss, SMOTE oversampling, stratified k-fold cross-validation and the
// (alpha, beta) grid search.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace rolefinder {

using Row = std::vector<double>;

struct ClassWeights {
  double negative = 1.0;
  double positive = 1.0;

  double of(int label) const { return label ? positive : negative; }
  friend bool operator==(const ClassWeights&, const ClassWeights&) = default;
};

// w_c = N / (2 N_c). Throws ValidationError unless both classes are present.
ClassWeights balanced_class_weights(std::span<const int> labels);

struct LabeledDataset {
  std::vector<Row> rows;
  std::vector<int> labels;  // 1 = positive, 0 = negative
  std::vector<std::string> ids;  // optional row identifiers
  ClassWeights weights;

  std::size_t size() const { return rows.size(); }
  std::size_t dimension() const { return rows.empty() ? 0 : rows.front().size(); }
  std::size_t positives() const;
  std::size_t negatives() const { return size() - positives(); }
  // Throws ValidationError on ragged rows, non-binary labels or non-finite values.
  void validate() const;
};

// Dataset with balanced class weights.
LabeledDataset make_dataset(std::vector<Row> rows, std::vector<int> labels,
                            std::vector<std::string> ids = {});

struct TrainingConfig {
  double alpha = 0.05;          // L2 strength
  double beta = 0.25;           // optimal-range boundary
  std::size_t folds = 10;
  std::size_t smote_neighbors = 5;
  std::size_t epochs = 100;
  double learning_rate = 0.01;  // eta_0 of eta_t = eta_0 / (1 + eta_0 * alpha * t)
  double tolerance = 1e-6;      // early stop when the epoch objective improves less
  std::uint64_t seed = 0;
  std::size_t jobs = 1;

  void validate() const;
};

inline constexpr double kProbabilityEpsilon = 1e-12;

struct LogisticModel {
  std::vector<double> weights;
  double bias = 0.0;
  double alpha = 0.0;
  // Training metadata.
  std::size_t epochs_run = 0;
  std::uint64_t seed = 0;
  double learning_rate = 0.0;
  double initial_objective = 0.0;
  double final_objective = 0.0;

  double decision(std::span<const double> row) const;
  // sigmoid(w.x + b). Throws ValidationError on dimension mismatch.
  double predict_proba(std::span<const double> row) const;

  friend bool operator==(const LogisticModel&, const LogisticModel&) = default;
};

double sigmoid(double z);
// -[y ln p + (1 - y) ln(1 - p)] with p clamped to [eps, 1 - eps].
double logistic_loss(double p, int y);
// sum_i w_{y_i} loss_i / sum_i w_{y_i}.
double weighted_mean_loss(std::span<const double> probabilities, std::span<const int> labels,
                          ClassWeights weights);
double weighted_logistic_loss(const LabeledDataset& data, const LogisticModel& model);

// Training objective: weighted mean loss + (alpha / 2) |w|^2, bias unregularized.
double objective(const LabeledDataset& data, std::span<const double> w, double b, double alpha);
// Analytic gradient of `objective`.
void objective_gradient(const LabeledDataset& data, std::span<const double> w, double b, double alpha,
                        std::span<double> grad_w, double& grad_b);

// Deterministic given config.seed.
LogisticModel fit_sgd(const LabeledDataset& data, const TrainingConfig& config);

// k nearest neighbours of every point (Euclidean, self excluded, ties by index).
std::vector<std::vector<std::size_t>> nearest_neighbors(std::span<const Row> points, std::size_t k);

struct SyntheticSample {
  Row row;
  std::size_t base = 0;      // index of x
  std::size_t neighbor = 0;  // index of x_nn
  double gap = 0.0;          // u in [0, 1]
};

// row = x + u * (x_nn - x). k is lowered to |minority| - 1 with a warning.
std::vector<SyntheticSample> smote_samples(std::span<const Row> minority, std::size_t k,
                                           std::size_t n_synthetic, std::uint64_t seed);
std::vector<Row> smote(std::span<const Row> minority, std::size_t k, std::size_t n_synthetic,
                       std::uint64_t seed);

// Oversamples the smaller class to a 1:1 ratio; synthetic rows get id "synthetic".
LabeledDataset balance_with_smote(const LabeledDataset& data, std::size_t k, std::uint64_t seed);

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

// Per-class seeded shuffle dealt round-robin over folds. k is lowered (with a
// warning) to the smaller class count; throws if that is below 2.
std::vector<Fold> stratified_kfold(std::span<const int> labels, std::size_t k, std::uint64_t seed);

// Area under the ROC curve; tied scores count one half.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

// Maps a raw row into the model's input space; produced per training fold.
using RowTransform = std::function<Row(std::span<const double>)>;
using TransformFitter =
    std::function<RowTransform(std::span<const Row> train_rows, std::span<const int> train_labels, double beta)>;

struct RoleProblem {
  std::string role;
  LabeledDataset data;  // raw (untransformed) rows
};

struct CrossValidation {
  std::vector<double> fold_losses;
  double mean_loss = 0.0;
  std::vector<double> out_of_fold;  // validation probability of every row
  double auc = 0.0;
};

// Per fold: fit transform on the training rows, transform both sides, SMOTE the
// training side to 1:1, fit, score the validation side with balanced weights.
CrossValidation cross_validate(const RoleProblem& problem, double alpha, double beta,
                               const TrainingConfig& config, const TransformFitter& fitter);

// Transform, oversample and fit on every row of the problem.
struct FittedRole {
  RowTransform transform;
  LogisticModel model;
};
FittedRole fit_role(const RoleProblem& problem, double alpha, double beta, const TrainingConfig& config,
                    const TransformFitter& fitter);

struct GridCell {
  double alpha = 0.0;
  double beta = 0.0;
  double loss = 0.0;

  friend bool operator==(const GridCell&, const GridCell&) = default;
};

// Minimum loss; ties prefer larger alpha, then larger beta.
GridCell select_best_cell(std::span<const GridCell> cells);

struct GridResult {
  std::vector<GridCell> table;      // alpha-major, grid order
  GridCell best;
  // per_role[c][r]: mean CV loss of problem r in cell c
  std::vector<std::vector<double>> per_role;
};

// Cell loss = mean over problems of their mean CV loss.
GridResult grid_search(std::span<const RoleProblem> problems, std::span<const double> alpha_grid,
                       std::span<const double> beta_grid, const TrainingConfig& config,
                       const TransformFitter& fitter);

}  // namespace rolefinder
