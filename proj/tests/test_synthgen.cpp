#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "rolefinder/errors.hpp"
#include "rolefinder/league_io.hpp"
#include "rolefinder/synthgen.hpp"
#include "test_support.hpp"

using namespace rolefinder;
using namespace rolefinder::testing;

namespace {

LeagueSpec small_spec(std::size_t teams, std::size_t matches, std::uint64_t seed = 3) {
  LeagueSpec s = default_league_spec();
  s.teams = teams;
  s.competitions = 1;
  s.matches_per_team = matches;
  s.seed = seed;
  return s;
}

EventProfile profile(EventType type, double rate) {
  EventProfile p;
  p.type = type;
  p.rate = rate;
  return p;
}

}  // namespace

TEST(Synthgen, SingleTeamSingleMatchParses) {
  LeagueSpec s = small_spec(1, 1);
  s.squad = {{"BWM", 3}, {"HM", 2}, {"DLP", 2}, {"BTB", 2}, {"AP", 2}};
  ASSERT_EQ(s.players_per_team(), 11u);
  const auto league = generate_league(s);
  ASSERT_EQ(league.matches.size(), 1u);
  const auto& m = league.matches[0];
  EXPECT_EQ(league.truth.roles.size(), 11u);
  ASSERT_FALSE(m.events().empty());
  std::ostringstream out;
  serialize_events(out, m.events());
  std::istringstream in(out.str());
  const auto parsed = parse_match(in, m.meta(), {.strict = true});
  EXPECT_EQ(parsed.events(), m.events());
}

TEST(Synthgen, ParserCountMatchesGenerator) {
  const auto league = generate_league(small_spec(2, 1));
  ASSERT_EQ(league.matches.size(), 1u);
  const auto& m = league.matches[0];
  EXPECT_GE(m.events().size(), 1500u);
  std::ostringstream out;
  serialize_events(out, m.events());
  std::istringstream in(out.str());
  EXPECT_EQ(parse_match(in, m.meta()).events().size(), m.events().size());
}

TEST(Synthgen, StreamsSatisfyEventInvariants) {
  const auto league = generate_league(small_spec(4, 3));
  for (const auto& m : league.matches) {
    double last = 0;
    for (const auto& e : m.events()) {
      EXPECT_NO_THROW(validate_event(e));
      EXPECT_GE(e.minute, last);
      last = e.minute;
      EXPECT_TRUE(m.minutes().contains(e.player.player_id));
      EXPECT_EQ(league.team_of.at(e.player.player_id), e.player.team_id);
    }
  }
}

TEST(Synthgen, InterceptionRatesSeparate) {
  LeagueSpec s = small_spec(1, 10);
  s.noise = 0.0;
  s.minutes = {1.0, 0.0, 25.0};
  RoleArchetype bwm{"BWM", {profile(EventType::interception, 8.0), profile(EventType::touch, 10.0)}, 1.0};
  RoleArchetype ap{"AP", {profile(EventType::interception, 1.0), profile(EventType::touch, 10.0)}, 1.0};
  s.archetypes = {bwm, ap};
  s.squad = {{"BWM", 6}, {"AP", 5}};
  const auto league = generate_league(s);
  std::map<std::string, int> interceptions;
  for (const auto& m : league.matches)
    for (const auto& e : m.events())
      if (e.type == EventType::interception) ++interceptions[e.player.player_id];
  // Poisson(80) vs Poisson(10): P(BWM <= AP) is below 1e-15 for each pair.
  for (const auto& [b, rb] : league.truth.roles) {
    if (rb != "BWM") continue;
    for (const auto& [a, ra] : league.truth.roles) {
      if (ra == "AP") EXPECT_GT(interceptions[b], interceptions[a]) << b << " vs " << a;
    }
  }
}

TEST(Synthgen, FrequenciesConvergeToRates) {
  LeagueSpec s = small_spec(2, 90, 11);
  s.noise = 0.0;
  s.minutes = {1.0, 0.0, 25.0};
  const auto league = generate_league(s);
  std::map<std::string, std::map<EventType, double>> counts;
  for (const auto& m : league.matches)
    for (const auto& e : m.events()) counts[e.player.player_id][e.type] += 1;

  std::size_t strict_checks = 0;
  for (const auto& [player, role] : league.truth.roles) {
    std::map<EventType, double> expected;
    for (const auto& p : s.archetype(role).events) expected[p.type] += p.rate * 90.0;
    for (const auto& [type, mean] : expected) {
      // Receptions add touches on top of the profile rate.
      if (type == EventType::touch || mean == 0.0) continue;
      const double observed = counts[player][type];
      if (mean >= 1000.0) {
        ++strict_checks;
        EXPECT_LT(std::abs(observed - mean) / mean, 0.10) << player << " " << to_string(type);
      } else {
        EXPECT_LE(std::abs(observed - mean), 4.0 * std::sqrt(mean) + 1.0) << player << " " << to_string(type);
      }
    }
  }
  EXPECT_GT(strict_checks, 10u);
}

TEST(Synthgen, ReceptionsFollowAccuratePasses) {
  const auto league = generate_league(small_spec(2, 1));
  const auto& ev = league.matches[0].events();
  std::size_t receptions = 0;
  for (std::size_t i = 0; i + 1 < ev.size(); ++i) {
    if (ev[i].type != EventType::pass || !ev[i].has(qualifier::accurate)) continue;
    const auto& next = ev[i + 1];
    EXPECT_EQ(next.type, EventType::touch);
    EXPECT_EQ(next.player.team_id, ev[i].player.team_id);
    EXPECT_NE(next.player.player_id, ev[i].player.player_id);
    EXPECT_EQ(next.start, *ev[i].end);
    ++receptions;
  }
  EXPECT_GT(receptions, 100u);
}

TEST(Synthgen, LabelCount) {
  EXPECT_EQ(label_count(0.186, 1910), 356u);
  EXPECT_EQ(label_count(0.0, 100), 0u);
  EXPECT_EQ(label_count(1.0, 100), 100u);
  EXPECT_EQ(label_count(0.25, 40), 10u);
  EXPECT_THROW(label_count(1.5, 10), ValidationError);
}

TEST(Synthgen, LabelsAreStratifiedEligibleSample) {
  const auto& spec = default_league_spec();
  const auto league = generate_league(spec);
  std::map<std::string, double> minutes;
  for (const auto& m : league.matches)
    for (const auto& [p, v] : m.minutes()) minutes[p] += v;
  std::size_t eligible = 0;
  std::map<std::string, std::size_t> eligible_by_role, labeled_by_role;
  for (const auto& [p, role] : league.truth.roles) {
    if (minutes[p] >= spec.label_min_minutes) {
      ++eligible;
      ++eligible_by_role[role];
    }
  }
  EXPECT_EQ(league.labeled.roles.size(), label_count(spec.label_fraction, eligible));
  for (const auto& [p, role] : league.labeled.roles) {
    EXPECT_EQ(league.truth.roles.at(p), role);
    EXPECT_GE(minutes[p], spec.label_min_minutes);
    ++labeled_by_role[role];
  }
  const double total = static_cast<double>(league.labeled.roles.size());
  for (const auto& [role, n] : eligible_by_role) {
    const double exact = total * static_cast<double>(n) / static_cast<double>(eligible);
    EXPECT_LE(std::abs(static_cast<double>(labeled_by_role[role]) - exact), 1.0) << role;
  }
  EXPECT_GE(league.truth.roles.size(), 300u);
}

TEST(Synthgen, ByteIdenticalForFixedSeed) {
  const auto spec = small_spec(4, 2, 99);
  TempDir a("synth_a"), b("synth_b");
  write_league(a.path(), generate_league(spec, 1).matches);
  write_league(b.path(), generate_league(spec, 3).matches);
  std::size_t files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(a.path())) {
    const auto name = entry.path().filename();
    EXPECT_EQ(read_file(entry.path()), read_file(b.path() / name)) << name;
    ++files;
  }
  EXPECT_EQ(files, 1u + generate_league(spec).matches.size());

  auto other = spec;
  other.seed = 100;
  EXPECT_NE(serialize_event(generate_league(other).matches[0].events()[0]),
            serialize_event(generate_league(spec).matches[0].events()[0]));
}

TEST(Synthgen, ScheduleShapes) {
  // Round robin: every team plays matches_per_team times with distinct opponents in a cycle.
  const auto league = generate_league(small_spec(6, 5));
  std::map<std::string, std::set<std::string>> opponents;
  std::map<std::string, int> played;
  for (const auto& m : league.matches) {
    std::set<std::string> sides;
    for (const auto& [p, v] : m.minutes()) sides.insert(league.team_of.at(p));
    ASSERT_EQ(sides.size(), 2u);
    for (const auto& t : sides) {
      ++played[t];
      for (const auto& o : sides)
        if (o != t) opponents[t].insert(o);
    }
  }
  EXPECT_EQ(played.size(), 6u);
  for (const auto& [t, n] : played) {
    EXPECT_EQ(n, 5);
    EXPECT_EQ(opponents[t].size(), 5u);
  }
  // Competitions never mix.
  LeagueSpec two = small_spec(4, 3);
  two.competitions = 2;
  for (const auto& m : generate_league(two).matches) {
    std::set<std::string> comps;
    for (const auto& [p, v] : m.minutes()) {
      const int team = std::stoi(p.substr(1, 2));
      comps.insert(team <= 2 ? "comp1" : "comp2");
    }
    EXPECT_EQ(comps.size(), 1u);
    EXPECT_EQ(*comps.begin(), m.competition_id());
  }
}

TEST(Synthgen, SpecValidationAndJson) {
  const auto& spec = default_league_spec();
  EXPECT_EQ(parse_league_spec(league_spec_to_json(spec)), spec);
  EXPECT_EQ(spec.archetypes.size(), 7u);
  for (auto r : kMidfielderRoles) EXPECT_NO_THROW(spec.archetype(r));

  auto bad = spec;
  bad.squad = {{"BWM", 5}};
  EXPECT_THROW(bad.validate(), ValidationError);
  bad = spec;
  bad.label_fraction = 1.2;
  EXPECT_THROW(bad.validate(), ValidationError);
  bad = spec;
  bad.teams = 3;
  EXPECT_THROW(bad.validate(), ValidationError);  // 3 teams into 2 competitions
  bad = spec;
  bad.squad.push_back({"GK", 1});
  EXPECT_THROW(bad.validate(), ValidationError);

  RoleArchetype degenerate{"X", {profile(EventType::pass, 5.0), profile(EventType::shot, 0.0)}, 1.0};
  EXPECT_THROW(degenerate.validate(), ValidationError);
  RoleArchetype negative{"X", {profile(EventType::pass, 5.0), profile(EventType::shot, -1.0)}, 1.0};
  EXPECT_THROW(negative.validate(), ValidationError);
  auto prob = profile(EventType::pass, 5.0);
  prob.accuracy = 1.5;
  RoleArchetype bad_prob{"X", {prob, profile(EventType::shot, 1.0)}, 1.0};
  EXPECT_THROW(bad_prob.validate(), ValidationError);

  EXPECT_THROW(parse_league_spec(R"({"format":"other"})"), ValidationError);
}
