#pragma once

// Per-role binary datasets, training orchestration, scoring and ranking.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rolefinder/features.hpp"
#include "rolefinder/learner.hpp"
#include "rolefinder/range_transform.hpp"
#include "rolefinder/role_graph.hpp"

namespace rolefinder {

inline constexpr double kDefaultConnectedFraction = 0.25;
// Fewer positives or negatives than this leaves a role untrained.
inline constexpr std::size_t kMinClassRows = 3;

// ceil(fraction * n), robust to representation error in the product.
std::size_t connected_sample_size(double fraction, std::size_t n);

struct RoleDataset {
  std::string role;
  std::vector<std::size_t> rows;  // row indices into the feature matrix
  std::vector<int> labels;
  std::size_t disconnected_negatives = 0;
  std::size_t connected_negatives = 0;
  std::size_t connected_available = 0;

  std::size_t positives() const;
  std::size_t negatives() const { return labels.size() - positives(); }
};

// Positives: players labeled `role`. Negatives: every labeled player of a
// disconnected role plus ceil(fraction * n) of the n connected-role players,
// sampled without replacement. Labeled players missing from `features` are skipped.
RoleDataset build_role_dataset(const std::string& role, const FeatureMatrix& features, const LabelSet& labels,
                               const RoleGraph& graph, double connected_fraction, std::uint64_t seed);

LabeledDataset to_labeled(const RoleDataset& dataset, const FeatureMatrix& features);

// Fold-local transform: standardize base columns, combine key features,
// distance-transform against the role's optimal ranges.
struct RolePreprocessor {
  StandardizationParams standardization;
  CombinationSpec combinations;
  RoleRangeSet ranges;

  CompiledCombination compile() const { return {combinations, standardization.columns}; }
  Row key_features(std::span<const double> base_row, const CompiledCombination& compiled) const;
  Row apply(std::span<const double> base_row, const CompiledCombination& compiled) const;
  Row apply(std::span<const double> base_row) const { return apply(base_row, compile()); }
};

RolePreprocessor fit_preprocessor(const std::string& role, std::span<const std::string> base_columns,
                                  const CombinationSpec& combinations, std::span<const Row> rows,
                                  std::span<const int> labels, double beta, bool ranges_from_positives = true);

struct PipelineConfig {
  TrainingConfig training;
  std::vector<double> alpha_grid = {1.0, 0.5, 0.1, 0.05, 0.01, 0.005, 0.001};
  std::vector<double> beta_grid = {0.1, 0.2, 0.25, 0.3, 0.35, 0.4};
  double connected_fraction = kDefaultConnectedFraction;
  bool ranges_from_positives = true;
  // Roles to train; empty = every role in the graph.
  std::vector<std::string> roles;
};

struct RoleModel {
  std::string role;
  bool trained = false;
  std::string untrained_reason;
  double alpha = 0.0;
  double beta = 0.0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  LogisticModel model;
  RolePreprocessor preprocessor;

  double score(std::span<const double> base_row) const;
};

inline constexpr int kBundleFormatVersion = 1;

struct RoleModelBundle {
  int format_version = kBundleFormatVersion;
  std::vector<std::string> base_columns;  // feature manifest
  CombinationSpec combinations;
  std::string registry_hash;
  std::uint64_t seed = 0;
  double connected_fraction = kDefaultConnectedFraction;
  bool ranges_from_positives = true;
  std::vector<RoleModel> roles;  // every graph role, trained or not
  std::string manifest;          // file name of the run manifest that produced it

  const RoleModel* find(std::string_view role) const;
  std::vector<std::string> trained_roles() const;
};

struct RoleEvaluation {
  std::string role;
  bool trained = false;
  std::string note;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::size_t folds = 0;
  double cv_loss = 0.0;
  double cv_auc = 0.0;

  friend bool operator==(const RoleEvaluation&, const RoleEvaluation&) = default;
};

struct TrainReport {
  std::vector<GridCell> grid;
  GridCell best;
  std::vector<std::string> grid_roles;           // roles that entered the grid search
  std::vector<std::vector<double>> grid_per_role;  // [cell][role]
  std::vector<RoleEvaluation> evaluations;
  std::string manifest;

  friend bool operator==(const TrainReport&, const TrainReport&) = default;
};

struct TrainResult {
  RoleModelBundle bundle;
  TrainReport report;
};

// `base` holds the unstandardized normalized + team columns of every player.
TrainResult train_all(const FeatureMatrix& base, const CombinationSpec& combinations, const LabelSet& labels,
                      const RoleGraph& graph, const PipelineConfig& config, std::string registry_hash = {});

TrainResult train_all(std::span<const MatchRecord> matches, const LabelSet& labels, const RoleGraph& graph,
                      const StatRegistry& registry, const CombinationSpec& combinations,
                      const FeatureOptions& features, const PipelineConfig& config);

std::string registry_hash(const StatRegistry& registry);

// player -> role -> probability for every trained role.
using ScoreMap = std::map<std::string, std::map<std::string, double>>;

// Throws ValidationError if `features` lacks a column from the bundle's manifest.
ScoreMap score_players(const RoleModelBundle& bundle, const FeatureMatrix& features, std::size_t jobs = 1);

enum class RankFilter : std::uint8_t { all, labeled, unlabeled, mixed };
RankFilter rank_filter_from_string(std::string_view s);

struct RankedPlayer {
  std::string player;
  double probability = 0.0;
  bool labeled = false;

  friend bool operator==(const RankedPlayer&, const RankedPlayer&) = default;
};

// Descending probability, ties by player id. `mixed` = the best labeled player
// followed by the best top_k - 1 unlabeled players.
std::vector<RankedPlayer> rank_players(const ScoreMap& scores, const std::string& role, std::size_t top_k,
                                       RankFilter filter, const LabelSet& labels);

std::string bundle_to_json(const RoleModelBundle& bundle);
RoleModelBundle bundle_from_json(std::string_view text);

std::string report_to_json(const TrainReport& report);
TrainReport report_from_json(std::string_view text);
// alpha,beta,weighted_logistic_loss,best
std::string report_grid_csv(const TrainReport& report);
// Aligned columns; the best cell is marked with '*'.
std::string report_grid_text(const TrainReport& report);
std::string report_roles_text(const TrainReport& report);

// Player x role probability table with a Labeled column (CSV or aligned text).
std::string format_score_table(const ScoreMap& scores, std::span<const std::string> players,
                               std::span<const std::string> roles, const LabelSet& labels, bool csv);

}  // namespace rolefinder
