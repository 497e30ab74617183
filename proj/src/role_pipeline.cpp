#include "rolefinder/role_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "rolefinder/diagnostics.hpp"
#include "rolefinder/errors.hpp"
#include "rolefinder/parallel.hpp"
#include "rolefinder/seed.hpp"

namespace rolefinder {
namespace {

void check_fraction(double fraction) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw ValidationError("connected fraction must lie in [0, 1]");
  }
}

struct CompiledPreprocessor {
  RolePreprocessor pre;
  CompiledCombination compiled;
};

TransformFitter make_fitter(std::vector<std::string> columns, CombinationSpec combinations, std::string role,
                            bool from_positives, RolePreprocessor* capture = nullptr) {
  return [columns = std::move(columns), combinations = std::move(combinations), role = std::move(role),
          from_positives, capture](std::span<const Row> rows, std::span<const int> labels, double beta) {
    auto p = fit_preprocessor(role, columns, combinations, rows, labels, beta, from_positives);
    if (capture) *capture = p;
    auto state = std::make_shared<const CompiledPreprocessor>(CompiledPreprocessor{p, p.compile()});
    return RowTransform([state](std::span<const double> row) { return state->pre.apply(row, state->compiled); });
  };
}

class MutedWarnings {
 public:
  MutedWarnings() : previous_(set_warning_handler([](const std::string&) {})) {}
  ~MutedWarnings() { set_warning_handler(previous_); }
  MutedWarnings(const MutedWarnings&) = delete;
  MutedWarnings& operator=(const MutedWarnings&) = delete;

 private:
  WarningHandler previous_;
};

}  // namespace

std::size_t connected_sample_size(double fraction, std::size_t n) {
  check_fraction(fraction);
  const double k = std::ceil(fraction * static_cast<double>(n) - 1e-9);
  return std::min(n, static_cast<std::size_t>(std::max(0.0, k)));
}

std::size_t RoleDataset::positives() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
}

RoleDataset build_role_dataset(const std::string& role, const FeatureMatrix& features, const LabelSet& labels,
                               const RoleGraph& graph, double connected_fraction, std::uint64_t seed) {
  if (!graph.contains(role)) throw ValidationError("unknown role '" + role + "'");
  check_fraction(connected_fraction);
  validate_labels(labels, graph);

  RoleDataset d;
  d.role = role;
  std::vector<std::size_t> positives;
  std::vector<std::size_t> disconnected;
  std::vector<std::size_t> connected;
  std::size_t missing = 0;
  for (const auto& [player, r] : labels.roles) {
    const auto row = features.row_index(player);
    if (!row) {
      ++missing;
      continue;
    }
    if (r == role) {
      positives.push_back(*row);
    } else if (graph.connected(role, r)) {
      connected.push_back(*row);
    } else {
      disconnected.push_back(*row);
    }
  }
  if (missing > 0) {
    warn(std::to_string(missing) + " labeled player(s) have no feature row and were skipped");
  }
  if (positives.empty()) throw ValidationError("role '" + role + "' has no labeled players");

  // Partial Fisher-Yates: the first k entries are a uniform sample without replacement.
  const std::size_t k = connected_sample_size(connected_fraction, connected.size());
  d.connected_available = connected.size();
  auto rng = make_rng(seed, "connected:" + role);
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + uniform_index(rng, connected.size() - i);
    std::swap(connected[i], connected[j]);
  }
  connected.resize(k);
  std::sort(connected.begin(), connected.end());

  std::vector<std::pair<std::size_t, int>> all;
  for (auto r : positives) all.emplace_back(r, 1);
  for (auto r : disconnected) all.emplace_back(r, 0);
  for (auto r : connected) all.emplace_back(r, 0);
  std::sort(all.begin(), all.end());
  for (const auto& [r, y] : all) {
    d.rows.push_back(r);
    d.labels.push_back(y);
  }
  d.disconnected_negatives = disconnected.size();
  d.connected_negatives = k;
  return d;
}

LabeledDataset to_labeled(const RoleDataset& dataset, const FeatureMatrix& features) {
  std::vector<Row> rows;
  std::vector<std::string> ids;
  rows.reserve(dataset.rows.size());
  for (auto r : dataset.rows) {
    auto row = features.row(r);
    rows.emplace_back(row.begin(), row.end());
    ids.push_back(features.player(r));
  }
  return make_dataset(std::move(rows), dataset.labels, std::move(ids));
}

Row RolePreprocessor::key_features(std::span<const double> base_row, const CompiledCombination& compiled) const {
  return compiled.apply(standardization.apply_row(base_row));
}

Row RolePreprocessor::apply(std::span<const double> base_row, const CompiledCombination& compiled) const {
  return ranges.transform(key_features(base_row, compiled));
}

RolePreprocessor fit_preprocessor(const std::string& role, std::span<const std::string> base_columns,
                                  const CombinationSpec& combinations, std::span<const Row> rows,
                                  std::span<const int> labels, double beta, bool ranges_from_positives) {
  if (rows.size() != labels.size()) throw ValidationError("preprocessor: rows and labels differ in length");
  RolePreprocessor p;
  p.combinations = combinations;
  p.standardization = fit_standardization(rows, {base_columns.begin(), base_columns.end()});
  const auto compiled = p.compile();
  std::vector<Row> keys;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (ranges_from_positives && labels[i] != 1) continue;
    keys.push_back(p.key_features(rows[i], compiled));
  }
  if (keys.empty()) throw ValidationError("role '" + role + "': no positive rows to fit optimal ranges on");
  p.ranges = fit_role_ranges(role, keys, compiled.names(), beta);
  return p;
}

double RoleModel::score(std::span<const double> base_row) const {
  if (!trained) throw ValidationError("role '" + role + "' is not trained");
  return model.predict_proba(preprocessor.apply(base_row));
}

const RoleModel* RoleModelBundle::find(std::string_view role) const {
  for (const auto& r : roles) {
    if (r.role == role) return &r;
  }
  return nullptr;
}

std::vector<std::string> RoleModelBundle::trained_roles() const {
  std::vector<std::string> out;
  for (const auto& r : roles) {
    if (r.trained) out.push_back(r.role);
  }
  return out;
}

TrainResult train_all(const FeatureMatrix& base, const CombinationSpec& combinations, const LabelSet& labels,
                      const RoleGraph& graph, const PipelineConfig& config, std::string registry_hash) {
  config.training.validate();
  check_fraction(config.connected_fraction);
  if (config.alpha_grid.empty() || config.beta_grid.empty()) {
    throw ValidationError("alpha and beta grids must be non-empty");
  }
  validate_labels(labels, graph);
  // Surfaces dangling key-feature references before any training.
  (void)CompiledCombination(combinations, base.columns());

  std::vector<std::string> roles = config.roles;
  if (roles.empty()) {
    for (const auto& r : graph.roles()) roles.push_back(r.id);
  }
  for (const auto& r : roles) {
    if (!graph.contains(r)) throw ValidationError("unknown role '" + r + "'");
  }

  std::map<std::string, std::size_t> labeled_count;
  for (const auto& [player, role] : labels.roles) {
    if (base.row_index(player)) ++labeled_count[role];
  }

  TrainResult result;
  auto& bundle = result.bundle;
  bundle.base_columns = base.columns();
  bundle.combinations = combinations;
  bundle.registry_hash = std::move(registry_hash);
  bundle.seed = config.training.seed;
  bundle.connected_fraction = config.connected_fraction;
  bundle.ranges_from_positives = config.ranges_from_positives;

  std::vector<RoleProblem> problems;
  std::vector<RoleDataset> datasets;
  std::map<std::string, std::string> untrained;
  std::map<std::string, std::pair<std::size_t, std::size_t>> counts;
  {
    // Missing-row warnings come from the first dataset only.
    bool first = true;
    for (const auto& role : roles) {
      const std::size_t n = labeled_count[role];
      // Each CV training side needs two rows per class for SMOTE.
      if (n < kMinClassRows) {
        untrained[role] = std::to_string(n) + " labeled player(s); at least " + std::to_string(kMinClassRows) +
                          " needed";
        counts[role] = {n, 0};
        continue;
      }
      std::unique_ptr<MutedWarnings> mute;
      if (!first) mute = std::make_unique<MutedWarnings>();
      first = false;
      auto d = build_role_dataset(role, base, labels, graph, config.connected_fraction, config.training.seed);
      counts[role] = {d.positives(), d.negatives()};
      if (d.negatives() < kMinClassRows) {
        untrained[role] = std::to_string(d.negatives()) + " negative example(s); at least " +
                          std::to_string(kMinClassRows) + " needed";
        continue;
      }
      problems.push_back({role, to_labeled(d, base)});
      datasets.push_back(std::move(d));
    }
  }
  if (problems.empty()) throw ValidationError("no role has at least 3 labeled players and 3 negative examples");

  auto fitter_for = [&](const std::string& role, RolePreprocessor* capture = nullptr) {
    return make_fitter(base.columns(), combinations, role, config.ranges_from_positives, capture);
  };
  // The role name only labels the fitted range set, so one fitter serves the whole grid.
  const auto grid = grid_search(problems, config.alpha_grid, config.beta_grid, config.training, fitter_for(""));

  auto& report = result.report;
  report.grid = grid.table;
  report.best = grid.best;
  report.grid_per_role = grid.per_role;
  for (const auto& p : problems) report.grid_roles.push_back(p.role);

  const double alpha = grid.best.alpha;
  const double beta = grid.best.beta;
  std::vector<CrossValidation> cvs(problems.size());
  std::vector<RoleModel> fitted(problems.size());
  {
    MutedWarnings mute;
    parallel_for(problems.size(), config.training.jobs, [&](std::size_t i) {
      const auto& p = problems[i];
      TrainingConfig cfg = config.training;
      cfg.jobs = 1;
      cvs[i] = cross_validate(p, alpha, beta, cfg, fitter_for(p.role));
      RoleModel m;
      m.role = p.role;
      m.trained = true;
      m.alpha = alpha;
      m.beta = beta;
      m.positives = p.data.positives();
      m.negatives = p.data.negatives();
      m.model = fit_role(p, alpha, beta, cfg, fitter_for(p.role, &m.preprocessor)).model;
      fitted[i] = std::move(m);
    });
  }

  std::map<std::string, std::size_t> fitted_index;
  for (std::size_t i = 0; i < problems.size(); ++i) fitted_index[problems[i].role] = i;
  for (const auto& info : graph.roles()) {
    RoleEvaluation ev;
    ev.role = info.id;
    if (auto it = fitted_index.find(info.id); it != fitted_index.end()) {
      bundle.roles.push_back(fitted[it->second]);
      const auto& cv = cvs[it->second];
      ev.trained = true;
      ev.positives = fitted[it->second].positives;
      ev.negatives = fitted[it->second].negatives;
      ev.folds = cv.fold_losses.size();
      ev.cv_loss = cv.mean_loss;
      ev.cv_auc = cv.auc;
    } else {
      RoleModel m;
      m.role = info.id;
      auto reason = untrained.find(info.id);
      m.untrained_reason = reason != untrained.end() ? reason->second : "not selected for training";
      if (auto c = counts.find(info.id); c != counts.end()) {
        m.positives = c->second.first;
        m.negatives = c->second.second;
      }
      ev.note = m.untrained_reason;
      ev.positives = m.positives;
      ev.negatives = m.negatives;
      bundle.roles.push_back(std::move(m));
    }
    report.evaluations.push_back(std::move(ev));
  }
  return result;
}

std::string registry_hash(const StatRegistry& registry) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::uint64_t h = fnv1a64(registry_to_json(registry));
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kHex[h & 0xF];
    h >>= 4;
  }
  return out;
}

TrainResult train_all(std::span<const MatchRecord> matches, const LabelSet& labels, const RoleGraph& graph,
                      const StatRegistry& registry, const CombinationSpec& combinations,
                      const FeatureOptions& features, const PipelineConfig& config) {
  const auto tables = compute_features(matches, registry, combinations, features);
  return train_all(tables.base, combinations, labels, graph, config, registry_hash(registry));
}

ScoreMap score_players(const RoleModelBundle& bundle, const FeatureMatrix& features, std::size_t jobs) {
  for (const auto& c : bundle.base_columns) {
    if (!features.column_index(c)) {
      throw ValidationError("feature manifest mismatch: column '" + c + "' required by the bundle is missing");
    }
  }
  const auto selected = features.select_columns(bundle.base_columns);
  std::vector<const RoleModel*> models;
  std::vector<CompiledCombination> compiled;
  for (const auto& r : bundle.roles) {
    if (!r.trained) continue;
    if (r.preprocessor.standardization.columns != bundle.base_columns) {
      throw ValidationError("bundle role '" + r.role + "' disagrees with the feature manifest");
    }
    models.push_back(&r);
    compiled.push_back(r.preprocessor.compile());
  }
  std::vector<std::map<std::string, double>> rows(selected.rows());
  parallel_for(selected.rows(), jobs, [&](std::size_t i) {
    for (std::size_t m = 0; m < models.size(); ++m) {
      const auto x = models[m]->preprocessor.apply(selected.row(i), compiled[m]);
      rows[i][models[m]->role] = models[m]->model.predict_proba(x);
    }
  });
  ScoreMap out;
  for (std::size_t i = 0; i < rows.size(); ++i) out[selected.player(i)] = std::move(rows[i]);
  return out;
}

RankFilter rank_filter_from_string(std::string_view s) {
  if (s == "all") return RankFilter::all;
  if (s == "labeled") return RankFilter::labeled;
  if (s == "unlabeled") return RankFilter::unlabeled;
  if (s == "mixed") return RankFilter::mixed;
  throw ValidationError("unknown rank filter '" + std::string(s) + "' (all, labeled, unlabeled, mixed)");
}

std::vector<RankedPlayer> rank_players(const ScoreMap& scores, const std::string& role, std::size_t top_k,
                                       RankFilter filter, const LabelSet& labels) {
  std::vector<RankedPlayer> all;
  for (const auto& [player, by_role] : scores) {
    auto it = by_role.find(role);
    if (it == by_role.end()) continue;
    all.push_back({player, it->second, labels.roles.contains(player)});
  }
  if (all.empty()) throw ValidationError("role '" + role + "' has no trained model");
  std::stable_sort(all.begin(), all.end(), [](const RankedPlayer& a, const RankedPlayer& b) {
    if (a.probability != b.probability) return a.probability > b.probability;
    return a.player < b.player;
  });

  std::vector<RankedPlayer> out;
  auto take = [&](bool want_labeled, std::size_t n) {
    for (const auto& p : all) {
      if (out.size() >= n) break;
      if (p.labeled == want_labeled) out.push_back(p);
    }
  };
  switch (filter) {
    case RankFilter::all:
      out.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(std::min(top_k, all.size())));
      break;
    case RankFilter::labeled:
      take(true, top_k);
      break;
    case RankFilter::unlabeled:
      take(false, top_k);
      break;
    case RankFilter::mixed:
      if (top_k == 0) break;
      take(true, 1);
      take(false, top_k);
      break;
  }
  return out;
}

}  // namespace rolefinder
