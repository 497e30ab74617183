#include "rolefinder/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "rolefinder/diagnostics.hpp"
#include "rolefinder/errors.hpp"
#include "rolefinder/parallel.hpp"
#include "rolefinder/passing_network.hpp"

namespace rolefinder {
namespace {

template <typename T>
bool contains(const std::vector<T>& v, const T& x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

// Per-player accumulators for one or more matches.
struct PlayerAcc {
  std::vector<double> stats;
  double actions = 0.0;
  double team_actions = 0.0;
  double minutes = 0.0;
  std::map<std::string, double> actions_by_team;
  std::map<std::string, double> minutes_by_competition;
};

using AccMap = std::map<std::string, PlayerAcc>;

void merge_into(AccMap& into, AccMap&& from, std::size_t n_stats) {
  for (auto& [id, acc] : from) {
    auto [it, inserted] = into.try_emplace(id);
    auto& dst = it->second;
    if (inserted) {
      dst = std::move(acc);
      continue;
    }
    if (dst.stats.empty()) dst.stats.assign(n_stats, 0.0);
    for (std::size_t s = 0; s < acc.stats.size(); ++s) dst.stats[s] += acc.stats[s];
    dst.actions += acc.actions;
    dst.team_actions += acc.team_actions;
    dst.minutes += acc.minutes;
    for (const auto& [k, v] : acc.actions_by_team) dst.actions_by_team[k] += v;
    for (const auto& [k, v] : acc.minutes_by_competition) dst.minutes_by_competition[k] += v;
  }
}

AccMap accumulate_match(const MatchRecord& match, const StatRegistry& registry,
                        const ShotQualityFn& quality) {
  const std::size_t n_stats = registry.size();
  AccMap acc;
  std::map<std::string, double> team_events;
  std::map<std::string, std::string> player_team;
  for (const auto& e : match.events()) {
    team_events[e.player.team_id] += 1.0;
    player_team.emplace(e.player.player_id, e.player.team_id);
    auto& a = acc[e.player.player_id];
    if (a.stats.empty()) a.stats.assign(n_stats, 0.0);
    a.actions += 1.0;
    a.actions_by_team[e.player.team_id] += 1.0;
    for (std::size_t s = 0; s < n_stats; ++s) {
      a.stats[s] += stat_value(registry.stats()[s], e, quality);
    }
  }
  for (const auto& [player, minutes] : match.minutes()) {
    auto& a = acc[player];
    if (a.stats.empty()) a.stats.assign(n_stats, 0.0);
    a.minutes += minutes;
    a.minutes_by_competition[match.competition_id()] += minutes;
    if (auto t = player_team.find(player); t != player_team.end()) {
      a.team_actions += team_events[t->second];
    }
  }
  return acc;
}

template <typename Map>
std::string argmax_key(const Map& m) {
  std::string best;
  double best_v = -1.0;
  for (const auto& [k, v] : m) {
    if (v > best_v) {
      best = k;
      best_v = v;
    }
  }
  return best;
}

AccMap accumulate_all(std::span<const MatchRecord> matches, const StatRegistry& registry,
                      const ShotQualityFn& quality, std::size_t jobs) {
  std::vector<AccMap> partial(matches.size());
  parallel_for(matches.size(), jobs,
               [&](std::size_t i) { partial[i] = accumulate_match(matches[i], registry, quality); });
  AccMap total;
  for (auto& p : partial) merge_into(total, std::move(p), registry.size());
  return total;
}

std::vector<std::string> all_team_metric_names() {
  return {"pass_out_share",        "pass_in_share",      "degree_centrality",
          "betweenness_centrality", "closeness_centrality", "defensive_presence",
          "wide_contribution",     "final_third_share",  "own_half_share",
          "opposite_box_share",    "pass_completion"};
}

bool is_defensive(const Event& e) {
  switch (e.type) {
    case EventType::tackle:
    case EventType::interception:
    case EventType::clearance:
      return true;
    case EventType::duel:
      return e.subtype == Subtype::ground_defending_duel;
    default:
      return false;
  }
}

double shot_logit(double distance_m, double angle_rad) {
  return -1.0 + 1.5 * angle_rad - 0.1 * distance_m;
}

}  // namespace

bool EventFilter::matches(const Event& e) const {
  if (!types.empty() && !contains(types, e.type)) return false;
  if (!subtypes.empty() && (!e.subtype || !contains(subtypes, *e.subtype))) return false;
  for (std::size_t q : required) {
    if (!e.has(q)) return false;
  }
  for (std::size_t q : excluded) {
    if (e.has(q)) return false;
  }
  return true;
}

double default_shot_quality(const Event& shot) {
  constexpr double goal_width_m = 7.32;
  const double dx = (100.0 - shot.start.x) * 1.05;
  const double dy = (shot.start.y - 50.0) * 0.68;
  const double distance = std::hypot(dx, dy);
  double angle = std::atan2(goal_width_m * dx, dx * dx + dy * dy - 0.25 * goal_width_m * goal_width_m);
  if (angle < 0.0) angle += std::numbers::pi;
  return 1.0 / (1.0 + std::exp(-shot_logit(distance, angle)));
}

double stat_value(const StatDefinition& stat, const Event& e, const ShotQualityFn& quality) {
  if (!stat.filter.matches(e)) return 0.0;
  if (!stat.zones.empty()) {
    if (stat.anchor == ZoneAnchor::end && !e.end) return 0.0;
    const PitchPoint p = stat.anchor == ZoneAnchor::end ? *e.end : e.start;
    if (!zone_of(p).contains_all(stat.zones)) return 0.0;
  }
  switch (stat.kind) {
    case ValueKind::count:
      return 1.0;
    case ValueKind::qualifier_weighted: {
      double v = 0.0;
      for (const auto& [slot, w] : stat.qualifier_weights) {
        if (e.has(slot)) v += w;
      }
      return v;
    }
    case ValueKind::quality_weighted:
      return quality(e);
  }
  return 0.0;
}

StatRegistry::StatRegistry(std::vector<StatDefinition> stats, std::vector<std::string> team_metrics)
    : stats_(std::move(stats)), team_metrics_(std::move(team_metrics)) {
  std::set<std::string> names;
  for (const auto& s : stats_) {
    if (s.name.empty()) throw ValidationError("statistic with empty name");
    if (!names.insert(s.name).second) throw ValidationError("duplicate statistic name '" + s.name + "'");
    if (s.kind == ValueKind::qualifier_weighted && s.qualifier_weights.empty()) {
      throw ValidationError("statistic '" + s.name + "' is qualifier-weighted but has no weights");
    }
  }
  const auto known = all_team_metric_names();
  std::set<std::string> seen;
  for (const auto& m : team_metrics_) {
    if (!contains(known, m)) throw ValidationError("unknown team metric '" + m + "'");
    if (!seen.insert(m).second) throw ValidationError("duplicate team metric '" + m + "'");
  }
}

FeatureMatrix aggregate_stats(std::span<const MatchRecord> matches, const StatRegistry& registry,
                              double min_minutes, const ShotQualityFn& quality, std::size_t jobs) {
  if (registry.empty()) throw ValidationError("statistic registry is empty");
  if (matches.empty()) throw ValidationError("empty match set");
  const AccMap total = accumulate_all(matches, registry, quality, jobs);

  std::vector<std::string> players;
  std::vector<double> values;
  std::vector<PlayerInfo> info;
  for (const auto& [id, acc] : total) {
    if (acc.minutes < min_minutes) continue;
    players.push_back(id);
    values.insert(values.end(), acc.stats.begin(), acc.stats.end());
    info.push_back({argmax_key(acc.actions_by_team), argmax_key(acc.minutes_by_competition),
                    acc.actions, acc.team_actions, acc.minutes});
  }
  std::vector<std::string> columns;
  for (const auto& s : registry.stats()) columns.push_back(s.name);
  return {std::move(players), std::move(columns), std::move(values), std::move(info)};
}

FeatureMatrix normalize_dual(const FeatureMatrix& raw) {
  std::vector<std::string> columns;
  columns.reserve(raw.cols() * 2);
  for (const auto& c : raw.columns()) {
    columns.push_back(c + std::string(kPerPlayerSuffix));
    columns.push_back(c + std::string(kPerTeamSuffix));
  }
  std::vector<std::string> players;
  std::vector<double> values;
  std::vector<PlayerInfo> info;
  for (std::size_t r = 0; r < raw.rows(); ++r) {
    const auto& pi = raw.info(r);
    if (!(pi.player_action_count > 0.0) || !(pi.team_action_count > 0.0)) {
      warn("dropping player '" + raw.player(r) + "': zero action count");
      continue;
    }
    players.push_back(raw.player(r));
    info.push_back(pi);
    for (double v : raw.row(r)) {
      values.push_back(v / pi.player_action_count);
      values.push_back(v / pi.team_action_count);
    }
  }
  return {std::move(players), std::move(columns), std::move(values), std::move(info)};
}

std::span<const std::string> team_metric_names() {
  static const auto names = all_team_metric_names();
  return names;
}

FeatureMatrix team_metrics(std::span<const MatchRecord> matches, double min_minutes,
                           std::span<const std::string> metrics) {
  if (matches.empty()) throw ValidationError("empty match set");
  std::vector<std::string> selected(metrics.begin(), metrics.end());
  if (selected.empty()) selected = all_team_metric_names();
  const auto known = all_team_metric_names();
  for (const auto& m : selected) {
    if (!contains(known, m)) throw ValidationError("unknown team metric '" + m + "'");
  }

  struct TeamPlayer {
    double actions = 0, defensive = 0, flank = 0, final_third = 0, own_half = 0, box = 0;
    double passes = 0, accurate_passes = 0;
  };
  struct Team {
    std::map<std::string, std::size_t> index;
    std::vector<std::string> ids;
    std::vector<TeamPlayer> players;
    std::vector<std::tuple<std::size_t, std::size_t>> links;
    double defensive = 0;

    std::size_t node(const std::string& id) {
      auto [it, inserted] = index.try_emplace(id, ids.size());
      if (inserted) {
        ids.push_back(id);
        players.emplace_back();
      }
      return it->second;
    }
  };

  std::map<std::string, Team> teams;
  std::map<std::string, double> minutes;
  for (const auto& m : matches) {
    for (const auto& [p, mins] : m.minutes()) minutes[p] += mins;
    const auto& ev = m.events();
    for (std::size_t i = 0; i < ev.size(); ++i) {
      const auto& e = ev[i];
      auto& team = teams[e.player.team_id];
      const std::size_t u = team.node(e.player.player_id);
      auto& tp = team.players[u];
      const auto zones = zone_of(e.start);
      tp.actions += 1;
      if (zones.contains(Zone::flank)) tp.flank += 1;
      if (zones.contains(Zone::final_third)) tp.final_third += 1;
      if (zones.contains(Zone::own_half)) tp.own_half += 1;
      if (zones.contains(Zone::opposite_box)) tp.box += 1;
      if (is_defensive(e)) {
        tp.defensive += 1;
        team.defensive += 1;
      }
      if (e.type == EventType::pass) {
        tp.passes += 1;
        if (e.has(qualifier::accurate)) {
          tp.accurate_passes += 1;
          if (i + 1 < ev.size()) {
            const auto& next = ev[i + 1];
            if (next.player.team_id == e.player.team_id && next.player.player_id != e.player.player_id) {
              team.links.emplace_back(u, team.node(next.player.player_id));
            }
          }
        }
      }
    }
  }

  // Per-player sums across the teams they played for.
  struct Combined {
    double actions = 0;
    std::map<std::string, double> weighted;  // centralities weighted by actions
    double defensive = 0, team_defensive = 0, flank = 0, final_third = 0, own_half = 0, box = 0;
    double passes = 0, accurate_passes = 0;
  };
  std::map<std::string, Combined> combined;
  for (auto& [team_id, team] : teams) {
    PassGraph g(team.ids.size());
    for (auto [from, to] : team.links) g.add_pass(from, to);
    const auto out_share = out_pass_share(g);
    const auto in_share = in_pass_share(g);
    const auto degree = degree_centrality(g);
    const auto betweenness = betweenness_centrality(g);
    const auto closeness = closeness_centrality(g);
    for (std::size_t u = 0; u < team.ids.size(); ++u) {
      const auto& tp = team.players[u];
      auto& c = combined[team.ids[u]];
      c.actions += tp.actions;
      c.weighted["pass_out_share"] += tp.actions * out_share[u];
      c.weighted["pass_in_share"] += tp.actions * in_share[u];
      c.weighted["degree_centrality"] += tp.actions * degree[u];
      c.weighted["betweenness_centrality"] += tp.actions * betweenness[u];
      c.weighted["closeness_centrality"] += tp.actions * closeness[u];
      c.defensive += tp.defensive;
      c.team_defensive += team.defensive;
      c.flank += tp.flank;
      c.final_third += tp.final_third;
      c.own_half += tp.own_half;
      c.box += tp.box;
      c.passes += tp.passes;
      c.accurate_passes += tp.accurate_passes;
    }
  }

  auto ratio = [](double a, double b) { return b > 0.0 ? a / b : 0.0; };
  std::vector<std::string> players;
  std::vector<double> values;
  std::vector<PlayerInfo> info;
  for (const auto& [id, mins] : minutes) {
    if (mins < min_minutes) continue;
    players.push_back(id);
    PlayerInfo pi;
    pi.minutes_played = mins;
    const auto it = combined.find(id);
    const Combined c = it == combined.end() ? Combined{} : it->second;
    pi.player_action_count = c.actions;
    info.push_back(pi);
    for (const auto& m : selected) {
      double v = 0.0;
      if (auto w = c.weighted.find(m); w != c.weighted.end()) {
        v = ratio(w->second, c.actions);
      } else if (m == "defensive_presence") {
        v = ratio(c.defensive, c.team_defensive);
      } else if (m == "wide_contribution") {
        v = ratio(c.flank, c.actions);
      } else if (m == "final_third_share") {
        v = ratio(c.final_third, c.actions);
      } else if (m == "own_half_share") {
        v = ratio(c.own_half, c.actions);
      } else if (m == "opposite_box_share") {
        v = ratio(c.box, c.actions);
      } else if (m == "pass_completion") {
        v = ratio(c.accurate_passes, c.passes);
      }
      values.push_back(v);
    }
  }
  return {std::move(players), std::move(selected), std::move(values), std::move(info)};
}

double StandardizationParams::apply(std::size_t column, double value) const {
  if (constant[column]) return 0.0;
  return std::clamp((value - mean[column]) / sd[column], -clip, clip);
}

std::vector<double> StandardizationParams::apply_row(std::span<const double> row) const {
  if (row.size() != columns.size()) throw ValidationError("standardization: row dimension mismatch");
  std::vector<double> out(row.size());
  for (std::size_t c = 0; c < row.size(); ++c) out[c] = apply(c, row[c]);
  return out;
}

StandardizationParams fit_standardization(std::span<const std::vector<double>> rows,
                                          std::vector<std::string> columns) {
  if (rows.size() < 2) throw ValidationError("standardization needs at least 2 rows");
  const std::size_t d = columns.size();
  StandardizationParams p;
  p.columns = std::move(columns);
  p.mean.assign(d, 0.0);
  p.sd.assign(d, 0.0);
  p.constant.assign(d, true);
  const double n = static_cast<double>(rows.size());
  for (const auto& r : rows) {
    if (r.size() != d) throw ValidationError("standardization: row dimension mismatch");
    for (std::size_t c = 0; c < d; ++c) p.mean[c] += r[c];
  }
  for (std::size_t c = 0; c < d; ++c) p.mean[c] /= n;
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < d; ++c) {
      const double dev = r[c] - p.mean[c];
      p.sd[c] += dev * dev;
      if (r[c] != rows.front()[c]) p.constant[c] = false;
    }
  }
  for (std::size_t c = 0; c < d; ++c) {
    p.sd[c] = p.constant[c] ? 0.0 : std::sqrt(p.sd[c] / (n - 1.0));
  }
  return p;
}

StandardizationParams fit_standardization(const FeatureMatrix& matrix) {
  std::vector<std::vector<double>> rows;
  rows.reserve(matrix.rows());
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    auto row = matrix.row(r);
    rows.emplace_back(row.begin(), row.end());
  }
  return fit_standardization(rows, matrix.columns());
}

FeatureMatrix apply_standardization(const FeatureMatrix& matrix, const StandardizationParams& params) {
  if (matrix.columns() != params.columns) throw ValidationError("standardization: column mismatch");
  std::vector<double> values;
  values.reserve(matrix.values().size());
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    for (std::size_t c = 0; c < matrix.cols(); ++c) values.push_back(params.apply(c, matrix.at(r, c)));
  }
  return {matrix.players(), matrix.columns(), std::move(values), matrix.info()};
}

std::pair<FeatureMatrix, StandardizationParams> standardize(const FeatureMatrix& matrix) {
  auto params = fit_standardization(matrix);
  auto out = apply_standardization(matrix, params);
  return {std::move(out), std::move(params)};
}

FeatureMatrix standardize_by_competition(const FeatureMatrix& matrix) {
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t r = 0; r < matrix.rows(); ++r) groups[matrix.info(r).competition_id].push_back(r);
  std::vector<double> values(matrix.values().size());
  for (const auto& [competition, rows] : groups) {
    if (rows.size() < 2) {
      throw ValidationError("competition '" + competition + "' has fewer than 2 players to standardize");
    }
    const auto params = fit_standardization(matrix.select_rows(rows));
    for (std::size_t r : rows) {
      for (std::size_t c = 0; c < matrix.cols(); ++c) {
        values[r * matrix.cols() + c] = params.apply(c, matrix.at(r, c));
      }
    }
  }
  return {matrix.players(), matrix.columns(), std::move(values), matrix.info()};
}

CompiledCombination::CompiledCombination(const CombinationSpec& spec, std::span<const std::string> columns) {
  std::map<std::string_view, std::size_t> index;
  for (std::size_t c = 0; c < columns.size(); ++c) index.emplace(columns[c], c);
  std::set<std::string> names;
  for (const auto& key : spec.keys) {
    if (!names.insert(key.name).second) throw ValidationError("duplicate key feature '" + key.name + "'");
    if (key.inputs.empty()) throw ValidationError("key feature '" + key.name + "' has no inputs");
    std::vector<std::pair<std::size_t, double>> terms;
    double total = 0.0;
    for (const auto& [column, weight] : key.inputs) {
      auto it = index.find(column);
      if (it == index.end()) {
        throw ValidationError("dangling column reference '" + column + "' in key feature '" + key.name + "'");
      }
      if (!std::isfinite(weight)) throw ValidationError("non-finite weight in key feature '" + key.name + "'");
      terms.emplace_back(it->second, weight);
      total += std::abs(weight);
    }
    if (total <= 0.0) throw ValidationError("key feature '" + key.name + "' has zero total weight");
    for (auto& t : terms) t.second /= total;
    names_.push_back(key.name);
    terms_.push_back(std::move(terms));
  }
}

std::vector<double> CompiledCombination::apply(std::span<const double> row) const {
  std::vector<double> out(terms_.size());
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    double v = 0.0;
    for (const auto& [c, w] : terms_[k]) v += w * row[c];
    out[k] = std::clamp(v, -kClipHalfWidth, kClipHalfWidth);
  }
  return out;
}

FeatureMatrix key_features_only(const FeatureMatrix& standardized, const CombinationSpec& spec) {
  const CompiledCombination combo(spec, standardized.columns());
  std::vector<double> values;
  values.reserve(standardized.rows() * combo.size());
  for (std::size_t r = 0; r < standardized.rows(); ++r) {
    auto keys = combo.apply(standardized.row(r));
    values.insert(values.end(), keys.begin(), keys.end());
  }
  return {standardized.players(), combo.names(), std::move(values), standardized.info()};
}

FeatureMatrix combine_key_features(const FeatureMatrix& standardized, const CombinationSpec& spec) {
  return hconcat(standardized, key_features_only(standardized, spec));
}

FeatureTables compute_features(std::span<const MatchRecord> matches, const StatRegistry& registry,
                               const CombinationSpec& combinations, const FeatureOptions& options) {
  FeatureTables t;
  const auto raw = aggregate_stats(matches, registry, options.min_minutes, default_shot_quality, options.jobs);
  t.normalized = normalize_dual(raw);
  const auto team = team_metrics(matches, options.min_minutes, registry.team_metrics());
  std::vector<std::size_t> rows;
  rows.reserve(t.normalized.rows());
  for (const auto& p : t.normalized.players()) {
    auto r = team.row_index(p);
    if (!r) throw InvariantError("team metrics missing player '" + p + "'");
    rows.push_back(*r);
  }
  t.team = team.select_rows(rows);
  t.team = FeatureMatrix(t.team.players(), t.team.columns(), t.team.values(), t.normalized.info());
  t.base = hconcat(t.normalized, t.team);
  auto [standardized, params] = standardize(t.base);
  if (options.per_competition) standardized = standardize_by_competition(t.base);
  t.base_standardization = std::move(params);
  t.keys = key_features_only(standardized, combinations);
  return t;
}

}  // namespace rolefinder
