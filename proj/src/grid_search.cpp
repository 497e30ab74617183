#include <cmath>
#include <limits>

#include "rolefinder/diagnostics.hpp"
#include "rolefinder/errors.hpp"
#include "rolefinder/learner.hpp"
#include "rolefinder/parallel.hpp"
#include "rolefinder/seed.hpp"

namespace rolefinder {
namespace {

std::vector<Row> gather(const LabeledDataset& d, std::span<const std::size_t> idx, std::vector<int>& labels) {
  std::vector<Row> rows;
  rows.reserve(idx.size());
  labels.clear();
  for (std::size_t i : idx) {
    rows.push_back(d.rows[i]);
    labels.push_back(d.labels[i]);
  }
  return rows;
}

TrainingConfig with_cell(const TrainingConfig& base, double alpha, double beta, std::uint64_t seed) {
  TrainingConfig c = base;
  c.alpha = alpha;
  c.beta = beta;
  c.seed = seed;
  return c;
}

LogisticModel fit_transformed(std::vector<Row> rows, std::vector<int> labels, const TrainingConfig& config,
                              std::uint64_t smote_seed) {
  const auto balanced = balance_with_smote(make_dataset(std::move(rows), std::move(labels)),
                                           config.smote_neighbors, smote_seed);
  return fit_sgd(balanced, config);
}

}  // namespace

CrossValidation cross_validate(const RoleProblem& problem, double alpha, double beta,
                               const TrainingConfig& config, const TransformFitter& fitter) {
  const auto& data = problem.data;
  data.validate();
  const auto folds = stratified_kfold(data.labels, config.folds, derive_seed(config.seed, "folds:" + problem.role));

  CrossValidation cv;
  cv.out_of_fold.assign(data.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const auto& fold = folds[f];
    std::vector<int> train_labels;
    std::vector<int> val_labels;
    const auto train_raw = gather(data, fold.train, train_labels);
    const auto val_raw = gather(data, fold.validation, val_labels);

    const RowTransform transform = fitter(train_raw, train_labels, beta);
    std::vector<Row> train;
    train.reserve(train_raw.size());
    for (const auto& r : train_raw) train.push_back(transform(r));

    const auto cfg = with_cell(config, alpha, beta, derive_seed(config.seed, "sgd:" + problem.role, f));
    const auto model = fit_transformed(std::move(train), train_labels, cfg,
                                       derive_seed(config.seed, "smote:" + problem.role, f));

    std::vector<double> probs;
    probs.reserve(val_raw.size());
    for (std::size_t i = 0; i < val_raw.size(); ++i) {
      probs.push_back(model.predict_proba(transform(val_raw[i])));
      cv.out_of_fold[fold.validation[i]] = probs.back();
    }
    cv.fold_losses.push_back(weighted_mean_loss(probs, val_labels, balanced_class_weights(val_labels)));
  }
  double sum = 0.0;
  for (double l : cv.fold_losses) sum += l;
  cv.mean_loss = sum / static_cast<double>(cv.fold_losses.size());
  cv.auc = roc_auc(cv.out_of_fold, data.labels);
  return cv;
}

FittedRole fit_role(const RoleProblem& problem, double alpha, double beta, const TrainingConfig& config,
                    const TransformFitter& fitter) {
  const auto& data = problem.data;
  data.validate();
  FittedRole out;
  out.transform = fitter(data.rows, data.labels, beta);
  std::vector<Row> rows;
  rows.reserve(data.size());
  for (const auto& r : data.rows) rows.push_back(out.transform(r));
  const auto cfg = with_cell(config, alpha, beta, derive_seed(config.seed, "sgd:" + problem.role, 1u << 20));
  out.model = fit_transformed(std::move(rows), data.labels, cfg,
                              derive_seed(config.seed, "smote:" + problem.role, 1u << 20));
  return out;
}

GridCell select_best_cell(std::span<const GridCell> cells) {
  if (cells.empty()) throw ValidationError("empty grid");
  GridCell best = cells.front();
  for (const auto& c : cells.subspan(1)) {
    const bool better = c.loss < best.loss ||
                        (c.loss == best.loss &&
                         (c.alpha > best.alpha || (c.alpha == best.alpha && c.beta > best.beta)));
    if (better) best = c;
  }
  return best;
}

GridResult grid_search(std::span<const RoleProblem> problems, std::span<const double> alpha_grid,
                       std::span<const double> beta_grid, const TrainingConfig& config,
                       const TransformFitter& fitter) {
  if (alpha_grid.empty() || beta_grid.empty()) throw ValidationError("alpha and beta grids must be non-empty");
  if (problems.empty()) throw ValidationError("grid search needs at least one role");

  std::vector<GridCell> cells;
  for (double a : alpha_grid) {
    for (double b : beta_grid) cells.push_back({a, b, 0.0});
  }
  const std::size_t n_roles = problems.size();
  std::vector<double> losses(cells.size() * n_roles, std::numeric_limits<double>::quiet_NaN());
  std::vector<std::string> failures(cells.size() * n_roles);

  // Fold-count reductions are reported once per role here, then muted for the cells.
  for (const auto& p : problems) {
    (void)stratified_kfold(p.data.labels, config.folds, derive_seed(config.seed, "folds:" + p.role));
  }
  const auto previous = set_warning_handler([](const std::string&) {});
  try {
    parallel_for(cells.size() * n_roles, config.jobs, [&](std::size_t i) {
      const auto& cell = cells[i / n_roles];
      const auto& problem = problems[i % n_roles];
      try {
        losses[i] = cross_validate(problem, cell.alpha, cell.beta, config, fitter).mean_loss;
      } catch (const ValidationError& e) {
        failures[i] = e.what();
      }
    });
  } catch (...) {
    set_warning_handler(previous);
    throw;
  }
  set_warning_handler(previous);

  GridResult result;
  result.per_role.resize(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    double sum = 0.0;
    std::size_t ok = 0;
    for (std::size_t r = 0; r < n_roles; ++r) {
      const double l = losses[c * n_roles + r];
      result.per_role[c].push_back(l);
      if (std::isnan(l)) {
        warn("grid cell alpha=" + std::to_string(cells[c].alpha) + " beta=" + std::to_string(cells[c].beta) +
             " failed for role " + problems[r].role + ": " + failures[c * n_roles + r]);
        continue;
      }
      sum += l;
      ++ok;
    }
    if (ok == 0) {
      throw ValidationError("grid cell alpha=" + std::to_string(cells[c].alpha) +
                            " beta=" + std::to_string(cells[c].beta) + ": all folds failed");
    }
    cells[c].loss = sum / static_cast<double>(ok);
  }
  result.table = cells;
  result.best = select_best_cell(cells);
  return result;
}

}  // namespace rolefinder
