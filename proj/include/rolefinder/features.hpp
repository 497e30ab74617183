#pragma once

// Registry-driven player statistics, dual normalization, team-relative metrics,
// standardization with clipping and key-feature combination.

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rolefinder/event_model.hpp"
#include "rolefinder/feature_matrix.hpp"

namespace rolefinder {

enum class ValueKind : std::uint8_t {
  count,               // one per matching event
  qualifier_weighted,  // sum of weights of the qualifiers set on each matching event
  quality_weighted,    // shot quality of each matching event
};

// Which location the zone filter is evaluated on.
enum class ZoneAnchor : std::uint8_t { start, end };

struct EventFilter {
  std::vector<EventType> types;        // empty = any type
  std::vector<Subtype> subtypes;       // empty = any subtype (including none)
  std::vector<std::size_t> required;   // qualifier slots that must be set
  std::vector<std::size_t> excluded;   // qualifier slots that must be clear

  bool matches(const Event& e) const;
};

struct StatDefinition {
  std::string name;
  EventFilter filter;
  ZoneSet zones;  // every listed zone must hold; empty = anywhere
  ZoneAnchor anchor = ZoneAnchor::start;
  ValueKind kind = ValueKind::count;
  std::vector<std::pair<std::size_t, double>> qualifier_weights;
};

using ShotQualityFn = std::function<double(const Event&)>;

// Stand-in expected-goals model: logistic in distance to goal and the angle the
// goal mouth subtends, on a 105 x 68 m pitch.
double default_shot_quality(const Event& shot);

// Contribution of one event to a statistic (0 when it does not match).
double stat_value(const StatDefinition& stat, const Event& e, const ShotQualityFn& quality);

// Ordered collection of statistics with unique names, plus the team metrics to emit.
class StatRegistry {
 public:
  StatRegistry() = default;
  explicit StatRegistry(std::vector<StatDefinition> stats,
                        std::vector<std::string> team_metrics = {});

  const std::vector<StatDefinition>& stats() const { return stats_; }
  const std::vector<std::string>& team_metrics() const { return team_metrics_; }
  std::size_t size() const { return stats_.size(); }
  bool empty() const { return stats_.empty(); }

 private:
  std::vector<StatDefinition> stats_;
  std::vector<std::string> team_metrics_;
};

StatRegistry parse_registry(std::string_view json_text);
std::string registry_to_json(const StatRegistry& registry);
const StatRegistry& default_registry();

// Raw per-player aggregates. Rows: players with minutes_played >= min_minutes,
// sorted by player id. Cells: sum of stat_value over the player's events.
FeatureMatrix aggregate_stats(std::span<const MatchRecord> matches, const StatRegistry& registry,
                              double min_minutes, const ShotQualityFn& quality = default_shot_quality,
                              std::size_t jobs = 1);

inline constexpr std::string_view kPerPlayerSuffix = "_per_player_action";
inline constexpr std::string_view kPerTeamSuffix = "_per_team_action";

// Two columns per input column: value over the player's and over the team's action count.
FeatureMatrix normalize_dual(const FeatureMatrix& raw);

// Names of every team metric, in output order.
std::span<const std::string> team_metric_names();

// Passing-network centralities and team-relative ratios. `metrics` selects and
// orders columns (empty = all). Rows match aggregate_stats for the same filter.
FeatureMatrix team_metrics(std::span<const MatchRecord> matches, double min_minutes,
                           std::span<const std::string> metrics = {});

inline constexpr double kClipHalfWidth = 2.0;

struct StandardizationParams {
  std::vector<std::string> columns;
  std::vector<double> mean;
  std::vector<double> sd;  // sample (n - 1) estimator
  std::vector<bool> constant;
  double clip = kClipHalfWidth;

  // z = (v - mean) / sd clipped to [-clip, clip]; constant columns map to 0.
  double apply(std::size_t column, double value) const;
  std::vector<double> apply_row(std::span<const double> row) const;

  friend bool operator==(const StandardizationParams&, const StandardizationParams&) = default;
};

StandardizationParams fit_standardization(const FeatureMatrix& matrix);
StandardizationParams fit_standardization(std::span<const std::vector<double>> rows,
                                          std::vector<std::string> columns);
FeatureMatrix apply_standardization(const FeatureMatrix& matrix, const StandardizationParams& params);
std::pair<FeatureMatrix, StandardizationParams> standardize(const FeatureMatrix& matrix);
// Standardizes each competition separately (PlayerInfo::competition_id).
FeatureMatrix standardize_by_competition(const FeatureMatrix& matrix);

struct KeyFeature {
  std::string name;
  std::vector<std::pair<std::string, double>> inputs;  // column -> weight

  friend bool operator==(const KeyFeature&, const KeyFeature&) = default;
};

struct CombinationSpec {
  std::vector<KeyFeature> keys;

  friend bool operator==(const CombinationSpec&, const CombinationSpec&) = default;
};

CombinationSpec parse_combinations(std::string_view json_text);
std::string combinations_to_json(const CombinationSpec& spec);
const CombinationSpec& default_combinations();

// Spec resolved against a column list.
class CompiledCombination {
 public:
  CompiledCombination(const CombinationSpec& spec, std::span<const std::string> columns);

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  // Weighted mean sum(w v) / sum(|w|) of standardized inputs, clipped to [-2, 2].
  std::vector<double> apply(std::span<const double> standardized_row) const;

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<std::pair<std::size_t, double>>> terms_;
};

// Appends one column per key feature computed from the (standardized) matrix.
FeatureMatrix combine_key_features(const FeatureMatrix& standardized, const CombinationSpec& spec);
// Only the key-feature columns.
FeatureMatrix key_features_only(const FeatureMatrix& standardized, const CombinationSpec& spec);

// Output of the full feature stage.
struct FeatureTables {
  FeatureMatrix normalized;    // 2 * |registry| columns
  FeatureMatrix team;          // team metric columns
  FeatureMatrix base;          // normalized ++ team (unstandardized)
  FeatureMatrix keys;          // key features over the standardized base
  StandardizationParams base_standardization;
};

struct FeatureOptions {
  double min_minutes = 900.0;
  bool per_competition = false;
  std::size_t jobs = 1;
};

FeatureTables compute_features(std::span<const MatchRecord> matches, const StatRegistry& registry,
                               const CombinationSpec& combinations, const FeatureOptions& options);

}  // namespace rolefinder
