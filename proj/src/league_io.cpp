#include "rolefinder/league_io.hpp"

#include <fstream>
#include <set>

#include "rolefinder/errors.hpp"

namespace rolefinder {

namespace fs = std::filesystem;

std::vector<MatchRecord> load_league(const fs::path& dir, const ParseOptions& options,
                                     std::vector<std::string>* errors) {
  const fs::path meta_path = dir / kMetaFileName;
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  if (!fs::exists(meta_path)) throw ValidationError("no matches found in " + dir.string());

  std::ifstream meta_in(meta_path);
  if (!meta_in) throw IoError("cannot open " + meta_path.string());
  std::vector<MatchMeta> metas;
  try {
    metas = parse_meta(meta_in);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), meta_path.string() + ": " + e.reason());
  }
  if (metas.empty()) throw ValidationError("no matches found in " + dir.string());

  std::set<std::string> seen;
  std::vector<MatchRecord> matches;
  matches.reserve(metas.size());
  for (auto& meta : metas) {
    if (!seen.insert(meta.match_id).second) {
      throw ValidationError("duplicate match_id '" + meta.match_id + "' in " + meta_path.string());
    }
    const fs::path events_path = dir / (meta.match_id + ".jsonl");
    std::ifstream in(events_path);
    if (!in) throw IoError("cannot open " + events_path.string());
    try {
      matches.push_back(parse_match(in, meta, options));
    } catch (const ParseError& e) {
      if (!errors) throw ParseError(e.line(), events_path.string() + ": " + e.reason());
      errors->push_back(events_path.string() + ": line " + std::to_string(e.line()) + ": " + e.reason());
    } catch (const ValidationError& e) {
      if (!errors) throw ValidationError(events_path.string() + ": " + e.what());
      errors->push_back(events_path.string() + ": " + e.what());
    }
  }
  if (matches.empty()) throw ValidationError("no valid matches found in " + dir.string());
  return matches;
}

void write_league(const fs::path& dir, std::span<const MatchRecord> matches) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  std::ofstream meta_out(dir / kMetaFileName, std::ios::binary | std::ios::trunc);
  if (!meta_out) throw IoError("cannot write " + (dir / kMetaFileName).string());
  for (const auto& m : matches) {
    meta_out << serialize_meta(m.meta()) << '\n';
    std::ofstream out(dir / (m.match_id() + ".jsonl"), std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write events for " + m.match_id());
    serialize_events(out, m.events());
    if (!out) throw IoError("write failure for " + m.match_id());
  }
  if (!meta_out) throw IoError("write failure for " + (dir / kMetaFileName).string());
}

LeagueSummary summarize(std::span<const MatchRecord> matches) {
  LeagueSummary s;
  std::set<std::string> players;
  for (const auto& m : matches) {
    ++s.matches;
    s.events += m.events().size();
    ++s.matches_per_competition[m.competition_id()];
    for (const auto& [player, minutes] : m.minutes()) players.insert(player);
  }
  s.players = players.size();
  return s;
}

}  // namespace rolefinder
