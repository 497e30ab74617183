#pragma once

// A league directory holds `matches.meta` (one JSON line per match) and one
// `<match_id>.jsonl` event file per match.

#include <filesystem>
#include <map>
#include <string>
#include <span>
#include <vector>

#include "rolefinder/event_model.hpp"

namespace rolefinder {

inline constexpr const char* kMetaFileName = "matches.meta";

struct LeagueSummary {
  std::size_t matches = 0;
  std::size_t events = 0;
  std::size_t players = 0;
  std::map<std::string, std::size_t> matches_per_competition;
};

// Loads every match listed in `dir/matches.meta`. Throws IoError for missing
// files and ValidationError/ParseError (with file and line) for bad content.
// With `errors`, a match file that fails to parse is skipped and its error recorded.
std::vector<MatchRecord> load_league(const std::filesystem::path& dir,
                                     const ParseOptions& options = {},
                                     std::vector<std::string>* errors = nullptr);

// Writes the canonical form of `matches` into `dir` (created if needed).
void write_league(const std::filesystem::path& dir, std::span<const MatchRecord> matches);

LeagueSummary summarize(std::span<const MatchRecord> matches);

}  // namespace rolefinder
