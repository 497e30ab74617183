#include "rolefinder/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <json.hpp>

#include "rolefinder/errors.hpp"
#include "rolefinder/parallel.hpp"
#include "rolefinder/seed.hpp"
#include "rolefinder_defaults.hpp"

namespace rolefinder {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr std::string_view kLeagueFormat = "rolefinder-league/1";
constexpr double kMatchMinutes = 90.0;

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

double normal(Rng& rng) {
  const double u1 = 1.0 - uniform01(rng);  // (0, 1]
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

std::size_t poisson(Rng& rng, double lambda) {
  std::size_t n = 0;
  // Knuth's product method, in chunks so exp(-lambda) never underflows.
  while (lambda > 0.0) {
    const double chunk = std::min(lambda, 30.0);
    lambda -= chunk;
    const double limit = std::exp(-chunk);
    double p = uniform01(rng);
    while (p > limit) {
      ++n;
      p *= uniform01(rng);
    }
  }
  return n;
}

double round_to(double v, double step) { return std::floor(v / step) * step; }

std::string padded(std::size_t v, int width) {
  std::string s = std::to_string(v);
  return std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(s.size()))), '0') + s;
}

PitchPoint sample_start(Rng& rng, const EventProfile& p) {
  const double x = std::clamp(p.x_mean + p.x_sd * normal(rng), 0.0, 100.0);
  double y;
  if (uniform01(rng) < p.flank_prob) {
    const double off = 21.0 * uniform01(rng);
    y = uniform01(rng) < 0.5 ? off : 100.0 - off;
  } else {
    y = 21.0 + 58.0 * uniform01(rng);
  }
  return {round_to(x, 0.1), round_to(y, 0.1)};
}

struct PlayerSlot {
  std::string id;
  const RoleArchetype* archetype = nullptr;
  std::vector<double> multipliers;  // one per event profile
};

struct Team {
  std::string id;
  std::string competition;
  std::vector<PlayerSlot> players;
};

struct Fixture {
  std::size_t home = 0;
  std::optional<std::size_t> away;
  std::string competition;
};

struct Appearance {
  double start = 0.0;
  double minutes = 0.0;
};

Appearance sample_minutes(Rng& rng, const MinutesModel& m) {
  const double u = uniform01(rng);
  if (u < m.availability) return {0.0, kMatchMinutes};
  if (u < m.availability + (1.0 - m.availability) * m.sub_probability) {
    return {kMatchMinutes - m.sub_minutes, m.sub_minutes};
  }
  return {};
}

void team_events(Rng& rng, const Team& team, const std::string& match_id, const MinutesModel& model,
                 std::vector<Event>& out, std::vector<Appearance>& appearances, MatchMeta& meta) {
  appearances.clear();
  for (const auto& pl : team.players) {
    const auto a = sample_minutes(rng, model);
    appearances.push_back(a);
    if (a.minutes <= 0.0) continue;
    meta.minutes[pl.id] = a.minutes;
    const auto& profiles = pl.archetype->events;
    for (std::size_t k = 0; k < profiles.size(); ++k) {
      const auto& prof = profiles[k];
      const std::size_t n = poisson(rng, prof.rate * pl.multipliers[k] * a.minutes / kMatchMinutes);
      for (std::size_t i = 0; i < n; ++i) {
        Event e;
        e.match_id = match_id;
        e.player = {pl.id, team.id};
        e.type = prof.type;
        e.subtype = prof.subtype;
        e.minute = round_to(a.start + a.minutes * uniform01(rng), 0.01);
        e.start = sample_start(rng, prof);
        if (prof.accuracy) {
          e.qualifiers.set(uniform01(rng) < *prof.accuracy ? qualifier::accurate : qualifier::inaccurate);
        }
        for (const auto& [slot, prob] : prof.qualifiers) {
          if (uniform01(rng) < prob) e.qualifiers.set(slot);
        }
        if (is_directional(prof.type)) {
          const double ex = std::clamp(e.start.x + prof.end_dx_mean + prof.end_dx_sd * normal(rng), 0.0, 100.0);
          const double ey = std::clamp(e.start.y + 12.0 * normal(rng), 0.0, 100.0);
          e.end = PitchPoint{round_to(ex, 0.1), round_to(ey, 0.1)};
        }
        out.push_back(std::move(e));
      }
    }
  }
}

// Accurate passes are followed by the receiver's touch at the pass end point.
std::vector<Event> add_receptions(Rng& rng, std::vector<Event> events, const std::vector<const Team*>& teams,
                                  const std::vector<std::vector<Appearance>>& appearances) {
  std::vector<Event> out;
  out.reserve(events.size() * 2);
  std::vector<double> weights;
  for (auto& e : events) {
    const bool reception = e.type == EventType::pass && e.has(qualifier::accurate) && e.end;
    out.push_back(e);
    if (!reception) continue;
    std::size_t t = teams[0]->id == e.player.team_id ? 0 : 1;
    const auto& team = *teams[t];
    weights.assign(team.players.size(), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < team.players.size(); ++i) {
      const auto& a = appearances[t][i];
      const bool on_pitch = a.minutes > 0.0 && e.minute >= a.start && e.minute <= a.start + a.minutes;
      if (!on_pitch || team.players[i].id == e.player.player_id) continue;
      weights[i] = team.players[i].archetype->hubness;
      total += weights[i];
    }
    if (total <= 0.0) continue;
    double u = uniform01(rng) * total;
    std::size_t pick = 0;
    for (; pick + 1 < weights.size(); ++pick) {
      if (u < weights[pick]) break;
      u -= weights[pick];
    }
    while (weights[pick] <= 0.0) --pick;  // u landed on the last, empty tail
    Event touch;
    touch.match_id = e.match_id;
    touch.player = {team.players[pick].id, team.id};
    touch.type = EventType::touch;
    touch.start = *e.end;
    touch.minute = e.minute;
    out.push_back(std::move(touch));
  }
  return out;
}

std::vector<Fixture> schedule(const std::vector<Team>& teams, const LeagueSpec& spec) {
  std::vector<Fixture> fixtures;
  const std::size_t per = spec.teams / spec.competitions;
  for (std::size_t c = 0; c < spec.competitions; ++c) {
    const std::size_t first = c * per;
    const std::string& comp = teams[first].competition;
    if (per == 1) {
      for (std::size_t r = 0; r < spec.matches_per_team; ++r) fixtures.push_back({first, std::nullopt, comp});
      continue;
    }
    // Circle method; an odd competition gets a bye slot.
    std::vector<std::optional<std::size_t>> slots;
    for (std::size_t i = 0; i < per; ++i) slots.emplace_back(first + i);
    if (slots.size() % 2 == 1) slots.emplace_back(std::nullopt);
    const std::size_t n = slots.size();
    for (std::size_t r = 0; r < spec.matches_per_team; ++r) {
      const std::size_t round = r % (n - 1);
      const bool swap_sides = (r / (n - 1)) % 2 == 1;
      std::vector<std::optional<std::size_t>> order(n);
      order[0] = slots[0];
      for (std::size_t i = 1; i < n; ++i) order[i] = slots[1 + (i - 1 + round) % (n - 1)];
      for (std::size_t i = 0; i < n / 2; ++i) {
        auto a = order[i];
        auto b = order[n - 1 - i];
        if (!a || !b) continue;
        if (swap_sides) std::swap(a, b);
        fixtures.push_back({*a, *b, comp});
      }
    }
  }
  return fixtures;
}

EventProfile parse_profile(const json& j, const std::string& ctx) {
  EventProfile p;
  const auto type = event_type_from_string(j.at("type").get<std::string>());
  if (!type) throw ValidationError(ctx + ": unknown event type '" + j.at("type").get<std::string>() + "'");
  p.type = *type;
  if (j.contains("subtype")) {
    const auto sub = subtype_from_string(j["subtype"].get<std::string>());
    if (!sub) throw ValidationError(ctx + ": unknown subtype '" + j["subtype"].get<std::string>() + "'");
    p.subtype = *sub;
  }
  p.rate = j.at("rate").get<double>();
  p.x_mean = j.value("x_mean", p.x_mean);
  p.x_sd = j.value("x_sd", p.x_sd);
  p.flank_prob = j.value("flank_prob", p.flank_prob);
  if (j.contains("accuracy")) p.accuracy = j["accuracy"].get<double>();
  if (j.contains("qualifiers")) {
    for (const auto& [name, prob] : j["qualifiers"].items()) {
      const auto slot = qualifier_index(name);
      if (!slot) throw ValidationError(ctx + ": unknown qualifier '" + name + "'");
      p.qualifiers.emplace_back(*slot, prob.get<double>());
    }
  }
  p.end_dx_mean = j.value("end_dx_mean", p.end_dx_mean);
  p.end_dx_sd = j.value("end_dx_sd", p.end_dx_sd);
  return p;
}

ordered_json profile_to_json(const EventProfile& p) {
  ordered_json o;
  o["type"] = to_string(p.type);
  if (p.subtype) o["subtype"] = to_string(*p.subtype);
  o["rate"] = p.rate;
  o["x_mean"] = p.x_mean;
  o["x_sd"] = p.x_sd;
  o["flank_prob"] = p.flank_prob;
  if (p.accuracy) o["accuracy"] = *p.accuracy;
  if (!p.qualifiers.empty()) {
    ordered_json q = ordered_json::object();
    const auto names = qualifier_manifest();
    for (const auto& [slot, prob] : p.qualifiers) q[names[slot]] = prob;
    o["qualifiers"] = std::move(q);
  }
  if (is_directional(p.type)) {
    o["end_dx_mean"] = p.end_dx_mean;
    o["end_dx_sd"] = p.end_dx_sd;
  }
  return o;
}

}  // namespace

void RoleArchetype::validate() const {
  const std::string ctx = "archetype '" + role + "'";
  if (role.empty()) throw ValidationError("archetype without a role id");
  if (!(hubness >= 0.0)) throw ValidationError(ctx + ": hubness must be non-negative");
  std::set<EventType> active;
  for (const auto& e : events) {
    if (!(e.rate >= 0.0) || !std::isfinite(e.rate)) throw ValidationError(ctx + ": rates must be non-negative");
    if (!is_probability(e.flank_prob) || (e.accuracy && !is_probability(*e.accuracy))) {
      throw ValidationError(ctx + ": probabilities must lie in [0, 1]");
    }
    for (const auto& q : e.qualifiers) {
      if (!is_probability(q.second)) throw ValidationError(ctx + ": probabilities must lie in [0, 1]");
    }
    if (!(e.x_sd >= 0.0) || !(e.end_dx_sd >= 0.0)) throw ValidationError(ctx + ": spreads must be non-negative");
    if (e.rate > 0.0) active.insert(e.type);
  }
  if (active.size() < 2) throw ValidationError(ctx + ": needs at least two event types with a positive rate");
}

std::size_t LeagueSpec::players_per_team() const {
  std::size_t n = 0;
  for (const auto& s : squad) n += s.second;
  return n;
}

const RoleArchetype& LeagueSpec::archetype(std::string_view role) const {
  for (const auto& a : archetypes) {
    if (a.role == role) return a;
  }
  throw ValidationError("league spec: no archetype for role '" + std::string(role) + "'");
}

void LeagueSpec::validate() const {
  if (teams == 0) throw ValidationError("league spec: needs at least one team");
  if (competitions == 0 || teams % competitions != 0) {
    throw ValidationError("league spec: teams must split evenly into competitions");
  }
  if (players_per_team() < 11) throw ValidationError("league spec: at least 11 players per team");
  if (matches_per_team == 0) throw ValidationError("league spec: matches_per_team must be positive");
  if (!is_probability(label_fraction)) throw ValidationError("league spec: label fraction must lie in [0, 1]");
  if (!(noise >= 0.0)) throw ValidationError("league spec: noise must be non-negative");
  if (!is_probability(minutes.availability) || !is_probability(minutes.sub_probability) ||
      !(minutes.sub_minutes > 0.0 && minutes.sub_minutes <= kMatchMinutes)) {
    throw ValidationError("league spec: invalid minutes model");
  }
  std::set<std::string> roles;
  for (const auto& a : archetypes) {
    a.validate();
    if (!roles.insert(a.role).second) throw ValidationError("league spec: duplicate archetype '" + a.role + "'");
  }
  for (const auto& [role, count] : squad) (void)archetype(role);
}

LeagueSpec parse_league_spec(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("league spec: ") + e.what());
  }
  if (!doc.is_object() || doc.value("format", "") != kLeagueFormat) {
    throw ValidationError("league spec: expected \"format\": \"" + std::string(kLeagueFormat) + "\"");
  }
  LeagueSpec s;
  try {
    s.teams = doc.at("teams").get<std::size_t>();
    s.competitions = doc.value("competitions", std::size_t{1});
    s.matches_per_team = doc.at("matches_per_team").get<std::size_t>();
    for (const auto& q : doc.at("squad")) {
      s.squad.emplace_back(q.at("role").get<std::string>(), q.at("count").get<std::size_t>());
    }
    if (doc.contains("minutes")) {
      const auto& m = doc["minutes"];
      s.minutes.availability = m.value("availability", s.minutes.availability);
      s.minutes.sub_probability = m.value("sub_probability", s.minutes.sub_probability);
      s.minutes.sub_minutes = m.value("sub_minutes", s.minutes.sub_minutes);
    }
    s.label_fraction = doc.value("label_fraction", s.label_fraction);
    s.label_min_minutes = doc.value("label_min_minutes", s.label_min_minutes);
    s.noise = doc.value("noise", s.noise);
    s.seed = doc.value("seed", std::uint64_t{0});
    if (doc.contains("archetypes")) {
      for (const auto& a : doc["archetypes"]) {
        RoleArchetype arch;
        arch.role = a.at("role").get<std::string>();
        arch.hubness = a.value("hubness", 1.0);
        for (const auto& e : a.at("events")) arch.events.push_back(parse_profile(e, "archetype '" + arch.role + "'"));
        s.archetypes.push_back(std::move(arch));
      }
    } else {
      s.archetypes = default_league_spec().archetypes;
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("league spec: ") + e.what());
  }
  s.validate();
  return s;
}

std::string league_spec_to_json(const LeagueSpec& s) {
  ordered_json doc;
  doc["format"] = kLeagueFormat;
  doc["teams"] = s.teams;
  doc["competitions"] = s.competitions;
  doc["matches_per_team"] = s.matches_per_team;
  auto squad = ordered_json::array();
  for (const auto& [role, count] : s.squad) squad.push_back(ordered_json{{"role", role}, {"count", count}});
  doc["squad"] = std::move(squad);
  doc["minutes"] = ordered_json{{"availability", s.minutes.availability},
                                {"sub_probability", s.minutes.sub_probability},
                                {"sub_minutes", s.minutes.sub_minutes}};
  doc["label_fraction"] = s.label_fraction;
  doc["label_min_minutes"] = s.label_min_minutes;
  doc["noise"] = s.noise;
  doc["seed"] = s.seed;
  auto archetypes = ordered_json::array();
  for (const auto& a : s.archetypes) {
    auto events = ordered_json::array();
    for (const auto& e : a.events) events.push_back(profile_to_json(e));
    archetypes.push_back(ordered_json{{"role", a.role}, {"hubness", a.hubness}, {"events", std::move(events)}});
  }
  doc["archetypes"] = std::move(archetypes);
  return doc.dump(2) + "\n";
}

const LeagueSpec& default_league_spec() {
  static const LeagueSpec spec = parse_league_spec(defaults::kLeagueJson);
  return spec;
}

std::size_t label_count(double fraction, std::size_t n) {
  if (!is_probability(fraction)) throw ValidationError("label fraction must lie in [0, 1]");
  const double k = std::ceil(fraction * static_cast<double>(n) - 1e-9);
  return std::min(n, static_cast<std::size_t>(std::max(0.0, k)));
}

SyntheticLeague generate_league(const LeagueSpec& spec, std::size_t jobs) {
  spec.validate();
  std::vector<Team> teams;
  const std::size_t per = spec.teams / spec.competitions;
  std::size_t player_index = 0;
  SyntheticLeague league;
  for (std::size_t t = 0; t < spec.teams; ++t) {
    Team team;
    team.id = "t" + padded(t + 1, 2);
    team.competition = "comp" + std::to_string(t / per + 1);
    std::size_t number = 0;
    for (const auto& [role, count] : spec.squad) {
      const auto& arch = spec.archetype(role);
      for (std::size_t i = 0; i < count; ++i) {
        PlayerSlot p;
        p.id = team.id + "p" + padded(++number, 2);
        p.archetype = &arch;
        auto rng = make_rng(spec.seed, "player", player_index++);
        for (std::size_t k = 0; k < arch.events.size(); ++k) {
          p.multipliers.push_back(std::exp(spec.noise * normal(rng) - spec.noise * spec.noise / 2.0));
        }
        league.truth.roles[p.id] = role;
        league.team_of[p.id] = team.id;
        team.players.push_back(std::move(p));
      }
    }
    teams.push_back(std::move(team));
  }
  league.truth.provenance = "synthetic";
  league.labeled.provenance = "synthetic";

  const auto fixtures = schedule(teams, spec);
  std::vector<std::optional<MatchRecord>> records(fixtures.size());
  parallel_for(fixtures.size(), jobs, [&](std::size_t m) {
    const auto& f = fixtures[m];
    auto rng = make_rng(spec.seed, "match", m);
    MatchMeta meta;
    meta.match_id = "m" + padded(m + 1, 4);
    meta.competition_id = f.competition;
    std::vector<const Team*> sides{&teams[f.home]};
    if (f.away) sides.push_back(&teams[*f.away]);
    std::vector<Event> events;
    std::vector<std::vector<Appearance>> appearances(sides.size());
    for (std::size_t s = 0; s < sides.size(); ++s) {
      team_events(rng, *sides[s], meta.match_id, spec.minutes, events, appearances[s], meta);
    }
    std::stable_sort(events.begin(), events.end(),
                     [](const Event& a, const Event& b) { return a.minute < b.minute; });
    events = add_receptions(rng, std::move(events), sides, appearances);
    records[m].emplace(std::move(meta), std::move(events));
  });
  for (auto& r : records) league.matches.push_back(std::move(*r));

  // Labels: a per-role stratified sample of the eligible players, sized by
  // largest remainder so the total is label_count(fraction, eligible).
  std::map<std::string, double> minutes;
  for (const auto& m : league.matches) {
    for (const auto& [p, min] : m.minutes()) minutes[p] += min;
  }
  std::vector<std::string> role_order;
  std::map<std::string, std::vector<std::string>> eligible;
  std::size_t n_eligible = 0;
  for (const auto& [role, count] : spec.squad) {
    if (!eligible.contains(role)) role_order.push_back(role);
    eligible[role];
  }
  for (const auto& [player, role] : league.truth.roles) {
    auto it = minutes.find(player);
    if (it != minutes.end() && it->second >= spec.label_min_minutes) {
      eligible[role].push_back(player);
      ++n_eligible;
    }
  }
  const std::size_t total = label_count(spec.label_fraction, n_eligible);
  std::vector<std::size_t> quota(role_order.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t r = 0; r < role_order.size(); ++r) {
    const double exact = n_eligible == 0 ? 0.0
                                         : static_cast<double>(total) *
                                               static_cast<double>(eligible[role_order[r]].size()) /
                                               static_cast<double>(n_eligible);
    quota[r] = static_cast<std::size_t>(std::floor(exact));
    assigned += quota[r];
    remainders.emplace_back(exact - std::floor(exact), r);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < total && i < remainders.size(); ++i, ++assigned) {
    ++quota[remainders[i].second];
  }
  for (std::size_t r = 0; r < role_order.size(); ++r) {
    auto pool = eligible[role_order[r]];
    auto rng = make_rng(spec.seed, "labels:" + role_order[r]);
    const std::size_t k = std::min(quota[r], pool.size());
    for (std::size_t i = 0; i < k; ++i) {
      std::swap(pool[i], pool[i + uniform_index(rng, pool.size() - i)]);
      league.labeled.roles[pool[i]] = role_order[r];
    }
  }
  return league;
}

}  // namespace rolefinder
