#include <gtest/gtest.h>

#include "rolefinder/errors.hpp"
#include "rolefinder/league_io.hpp"
#include "test_support.hpp"

using namespace rolefinder;
using namespace rolefinder::testing;

namespace {

std::vector<MatchRecord> two_matches() {
  std::vector<MatchRecord> out;
  out.push_back(make_match({accurate_pass("a", "t1", 1), make_event("b", "t1", EventType::touch, 55, 50, {}, 1),
                            make_event("x", "t2", EventType::interception, 40, 40, {}, 3)},
                           {{"a", 90}, {"b", 90}, {"x", 90}}, "m1", "c1"));
  out.push_back(make_match({make_event("a", "t1", EventType::tackle, 30, 20, {qualifier::won}, 10)},
                           {{"a", 45}, {"y", 90}}, "m2", "c2"));
  return out;
}

}  // namespace

TEST(LeagueIo, WriteLoadRoundTrip) {
  TempDir dir("league_rt");
  const auto matches = two_matches();
  write_league(dir.path(), matches);
  EXPECT_TRUE(std::filesystem::exists(dir / "matches.meta"));
  EXPECT_TRUE(std::filesystem::exists(dir / "m1.jsonl"));

  const auto loaded = load_league(dir.path());
  ASSERT_EQ(loaded.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(loaded[i].meta(), matches[i].meta());
    EXPECT_EQ(loaded[i].events(), matches[i].events());
  }

  const auto s = summarize(loaded);
  EXPECT_EQ(s.matches, 2u);
  EXPECT_EQ(s.events, 4u);
  EXPECT_EQ(s.players, 4u);
  EXPECT_EQ(s.matches_per_competition.at("c1"), 1u);
  EXPECT_EQ(s.matches_per_competition.at("c2"), 1u);
}

TEST(LeagueIo, EmptyDirectoryHasNoMatches) {
  TempDir dir("league_empty");
  try {
    load_league(dir.path());
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("no matches found"), std::string::npos);
  }
  write_file(dir / "matches.meta", "\n");
  EXPECT_THROW(load_league(dir.path()), ValidationError);
}

TEST(LeagueIo, MissingDirectoryIsIoError) {
  TempDir dir("league_missing");
  EXPECT_THROW(load_league(dir / "nope"), IoError);
}

TEST(LeagueIo, MissingEventFileIsIoError) {
  TempDir dir("league_nofile");
  write_league(dir.path(), two_matches());
  std::filesystem::remove(dir / "m2.jsonl");
  EXPECT_THROW(load_league(dir.path()), IoError);
}

TEST(LeagueIo, CorruptLineStrictAndLenient) {
  TempDir dir("league_corrupt");
  write_league(dir.path(), two_matches());
  std::string text = read_file(dir / "m1.jsonl");
  text += "{not json\n";
  write_file(dir / "m1.jsonl", text);

  try {
    load_league(dir.path());
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
    EXPECT_NE(std::string(e.what()).find("m1.jsonl"), std::string::npos);
  }

  std::vector<std::string> errors;
  const auto loaded = load_league(dir.path(), {}, &errors);
  ASSERT_EQ(loaded.size(), 1u);
  EXPECT_EQ(loaded[0].match_id(), "m2");
  ASSERT_EQ(errors.size(), 1u);
  EXPECT_NE(errors[0].find("line 4"), std::string::npos);
}

TEST(LeagueIo, DuplicateMatchIdRejected) {
  TempDir dir("league_dup");
  write_league(dir.path(), two_matches());
  std::string meta = read_file(dir / "matches.meta");
  meta += meta.substr(0, meta.find('\n') + 1);
  write_file(dir / "matches.meta", meta);
  EXPECT_THROW(load_league(dir.path()), ValidationError);
}
