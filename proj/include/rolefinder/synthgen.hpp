#pragma once

// Synthetic leagues with planted role archetypes. Every player gets a role;
// per match, event counts for each of the archetype's event profiles are
// Poisson draws with mean rate * minutes / 90.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rolefinder/event_model.hpp"
#include "rolefinder/role_graph.hpp"

namespace rolefinder {

struct EventProfile {
  EventType type = EventType::pass;
  std::optional<Subtype> subtype;
  double rate = 0.0;  // per 90 minutes
  // Start location: x ~ N(x_mean, x_sd) clamped to the pitch; y on a flank with
  // probability flank_prob, else central.
  double x_mean = 50.0;
  double x_sd = 10.0;
  double flank_prob = 0.2;
  // Probability of `accurate` (the complement sets `inaccurate`); absent = neither.
  std::optional<double> accuracy;
  std::vector<std::pair<std::size_t, double>> qualifiers;  // slot -> probability
  // Directional events only: end_x = x + N(end_dx_mean, end_dx_sd).
  double end_dx_mean = 5.0;
  double end_dx_sd = 10.0;

  friend bool operator==(const EventProfile&, const EventProfile&) = default;
};

struct RoleArchetype {
  std::string role;
  std::vector<EventProfile> events;
  // Relative chance of being the receiver of a teammate's accurate pass.
  double hubness = 1.0;

  // Throws ValidationError on negative rates, probabilities outside [0, 1] or
  // fewer than two event types with a positive rate.
  void validate() const;

  friend bool operator==(const RoleArchetype&, const RoleArchetype&) = default;
};

struct MinutesModel {
  double availability = 0.85;     // chance of playing the full match
  double sub_probability = 0.5;   // chance of a substitute appearance otherwise
  double sub_minutes = 25.0;

  friend bool operator==(const MinutesModel&, const MinutesModel&) = default;
};

struct LeagueSpec {
  std::size_t teams = 32;
  std::size_t competitions = 2;  // teams are split evenly; matches stay inside a competition
  std::vector<std::pair<std::string, std::size_t>> squad;  // role -> players per team
  std::size_t matches_per_team = 15;
  MinutesModel minutes;
  double label_fraction = 0.186;
  double label_min_minutes = 900.0;  // only players above this can be labeled
  double noise = 0.25;               // sd of the per-player log-rate jitter
  std::uint64_t seed = 0;
  std::vector<RoleArchetype> archetypes;

  std::size_t players_per_team() const;
  const RoleArchetype& archetype(std::string_view role) const;
  // Throws ValidationError when the spec is unusable.
  void validate() const;

  friend bool operator==(const LeagueSpec&, const LeagueSpec&) = default;
};

LeagueSpec parse_league_spec(std::string_view json_text);
std::string league_spec_to_json(const LeagueSpec& spec);
// 32 teams, five midfield archetypes plus centre back and striker contrasts.
const LeagueSpec& default_league_spec();

// ceil(fraction * n) with the product's rounding error absorbed.
std::size_t label_count(double fraction, std::size_t n);

struct SyntheticLeague {
  std::vector<MatchRecord> matches;
  LabelSet truth;    // every player -> planted role
  LabelSet labeled;  // the revealed subset
  std::map<std::string, std::string> team_of;  // player -> team
};

// Deterministic given spec.seed; independent of `jobs`.
SyntheticLeague generate_league(const LeagueSpec& spec, std::size_t jobs = 1);

}  // namespace rolefinder
