#include "rolefinder/event_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "rolefinder/diagnostics.hpp"
#include "rolefinder/errors.hpp"

namespace rolefinder {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr std::array<std::string_view, kEventTypeCount> kEventTypeNames = {
    "pass", "shot", "cross", "tackle", "interception", "duel",
    "save", "clearance", "touch", "foul", "other"};

constexpr std::array<std::string_view, 17> kSubtypeNames = {
    "simple_pass",    "long_pass",   "high_pass",
    "smart_pass",     "launch",      "ground_attacking_duel",
    "ground_defending_duel",         "ground_loose_ball_duel",
    "aerial_duel",    "reflex_save", "save_attempt",
    "free_kick",      "corner",      "throw_in",
    "penalty",        "acceleration", "other"};

constexpr std::array<std::string_view, kZoneCount> kZoneNames = {
    "own_half", "possession_zone", "final_third", "opposite_box",
    "left_flank", "right_flank", "flank", "central"};

constexpr std::array<std::string_view, 25> kNamedQualifiers = {
    "accurate",          "inaccurate",      "left_foot",       "right_foot",
    "header",            "through_ball",    "key_pass",        "assist",
    "goal",              "won",             "lost",            "long_ball",
    "counter_attack",    "progressive",     "opportunity",     "blocked",
    "dangerous_ball_lost", "high",          "low",             "free_space_left",
    "free_space_right",  "sliding_tackle",  "recovery",        "red_card",
    "yellow_card"};

const std::array<std::string, kQualifierCount>& manifest_storage() {
  static const auto names = [] {
    std::array<std::string, kQualifierCount> out;
    for (std::size_t i = 0; i < kQualifierCount; ++i) {
      out[i] = i < kNamedQualifiers.size() ? std::string(kNamedQualifiers[i])
                                           : "reserved_" + std::to_string(i);
    }
    return out;
  }();
  return names;
}

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::string_view, N>& names, std::string_view name) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == name) return static_cast<Enum>(i);
  }
  return std::nullopt;
}

double number_field(const json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    throw ParseError(line, std::string("malformed record: missing field '") + key + "'");
  }
  if (!it->is_number()) {
    throw ParseError(line, std::string("malformed record: field '") + key + "' is not a number");
  }
  double v = it->get<double>();
  if (!std::isfinite(v)) {
    throw ParseError(line, std::string("malformed record: field '") + key + "' is not finite");
  }
  return v;
}

std::string string_field(const json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw ParseError(line, std::string("malformed record: missing string field '") + key + "'");
  }
  auto s = it->get<std::string>();
  if (s.empty()) {
    throw ParseError(line, std::string("malformed record: empty field '") + key + "'");
  }
  return s;
}

json parse_json_object(std::string_view line, std::size_t line_number) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(line_number, std::string("malformed record: ") + e.what());
  }
  if (!obj.is_object()) throw ParseError(line_number, "malformed record: expected an object");
  return obj;
}

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(),
                     [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

}  // namespace

std::string_view to_string(EventType type) { return kEventTypeNames.at(static_cast<std::size_t>(type)); }

std::optional<EventType> event_type_from_string(std::string_view name) {
  return lookup<EventType>(kEventTypeNames, name);
}

std::string_view to_string(Subtype subtype) { return kSubtypeNames.at(static_cast<std::size_t>(subtype)); }

std::optional<Subtype> subtype_from_string(std::string_view name) {
  return lookup<Subtype>(kSubtypeNames, name);
}

std::string_view to_string(Zone zone) { return kZoneNames.at(static_cast<std::size_t>(zone)); }

std::optional<Zone> zone_from_string(std::string_view name) { return lookup<Zone>(kZoneNames, name); }

std::span<const std::string> qualifier_manifest() { return manifest_storage(); }

std::optional<std::size_t> qualifier_index(std::string_view name) {
  const auto& names = manifest_storage();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return i;
  }
  return std::nullopt;
}

std::vector<Zone> ZoneSet::to_vector() const {
  std::vector<Zone> out;
  for (std::size_t i = 0; i < kZoneCount; ++i) {
    if (contains(static_cast<Zone>(i))) out.push_back(static_cast<Zone>(i));
  }
  return out;
}

ZoneSet zone_of(PitchPoint p) {
  using B = ZoneBounds;
  ZoneSet z;
  if (p.x < B::own_half_end) z.insert(Zone::own_half);
  if (p.x >= B::possession_begin && p.x <= B::possession_end) z.insert(Zone::possession_zone);
  if (p.x >= B::final_third_begin) z.insert(Zone::final_third);
  if (p.x >= B::box_begin && p.y >= B::box_lateral_low && p.y <= B::box_lateral_high) {
    z.insert(Zone::opposite_box);
  }
  if (p.y <= B::left_flank_end) {
    z.insert(Zone::left_flank);
    z.insert(Zone::flank);
  } else if (p.y >= B::right_flank_begin) {
    z.insert(Zone::right_flank);
    z.insert(Zone::flank);
  } else {
    z.insert(Zone::central);
  }
  return z;
}

void validate_event(const Event& e) {
  if (e.player.player_id.empty() || e.player.team_id.empty()) {
    throw ValidationError("event has an empty player or team id");
  }
  if (!on_pitch(e.start) || (e.end && !on_pitch(*e.end))) {
    throw ValidationError("coordinate out of range");
  }
  if (e.end && !is_directional(e.type)) {
    throw ValidationError("end location on non-directional event type '" +
                          std::string(to_string(e.type)) + "'");
  }
  if (!(e.minute >= 0.0) || !std::isfinite(e.minute)) {
    throw ValidationError("minute must be a non-negative number");
  }
}

MatchRecord::MatchRecord(MatchMeta meta, std::vector<Event> events)
    : meta_(std::move(meta)), events_(std::move(events)) {
  if (meta_.match_id.empty()) throw ValidationError("match has an empty match_id");
  for (const auto& [player, minutes] : meta_.minutes) {
    if (!(minutes >= 0.0) || !std::isfinite(minutes)) {
      throw ValidationError("player '" + player + "' has invalid minutes in match '" +
                            meta_.match_id + "'");
    }
  }
  for (const auto& e : events_) {
    validate_event(e);
    if (e.match_id != meta_.match_id) {
      throw ValidationError("event for match '" + e.match_id + "' in match '" + meta_.match_id + "'");
    }
    if (!meta_.minutes.contains(e.player.player_id)) {
      throw ValidationError("player '" + e.player.player_id + "' has events but no minutes in match '" +
                            meta_.match_id + "'");
    }
  }
  std::stable_sort(events_.begin(), events_.end(),
                   [](const Event& a, const Event& b) { return a.minute < b.minute; });
}

Event parse_event_line(std::string_view line, std::size_t line_number, const ParseOptions& options) {
  const json obj = parse_json_object(line, line_number);

  Event e;
  e.match_id = string_field(obj, "match_id", line_number);
  e.player.team_id = string_field(obj, "team_id", line_number);
  e.player.player_id = string_field(obj, "player_id", line_number);

  const std::string type_name = string_field(obj, "type", line_number);
  if (auto t = event_type_from_string(type_name)) {
    e.type = *t;
  } else if (options.strict) {
    throw ParseError(line_number, "unknown event type '" + type_name + "'");
  } else {
    e.type = EventType::other;
  }

  if (auto it = obj.find("subtype"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) throw ParseError(line_number, "malformed record: subtype is not a string");
    const auto name = it->get<std::string>();
    if (auto s = subtype_from_string(name)) {
      e.subtype = *s;
    } else if (options.strict) {
      throw ParseError(line_number, "unknown event subtype '" + name + "'");
    } else {
      e.subtype = Subtype::other;
    }
  }

  auto q = obj.find("q");
  if (q == obj.end() || !q->is_array()) {
    throw ParseError(line_number, "malformed record: missing qualifier array 'q'");
  }
  if (q->size() != kQualifierCount) throw ParseError(line_number, "qualifier vector wrong length");
  for (std::size_t i = 0; i < kQualifierCount; ++i) {
    const auto& v = (*q)[i];
    if (!v.is_boolean()) throw ParseError(line_number, "malformed record: qualifier is not a boolean");
    e.qualifiers.set(i, v.get<bool>());
  }

  e.start = {number_field(obj, "x", line_number), number_field(obj, "y", line_number)};
  const bool has_end_x = obj.contains("end_x") && !obj["end_x"].is_null();
  const bool has_end_y = obj.contains("end_y") && !obj["end_y"].is_null();
  if (has_end_x != has_end_y) {
    throw ParseError(line_number, "malformed record: end_x and end_y must appear together");
  }
  if (has_end_x) {
    e.end = PitchPoint{number_field(obj, "end_x", line_number), number_field(obj, "end_y", line_number)};
  }
  e.minute = number_field(obj, "minute", line_number);

  try {
    validate_event(e);
  } catch (const ParseError&) {
    throw;
  } catch (const ValidationError& err) {
    throw ParseError(line_number, err.what());
  }
  return e;
}

std::vector<Event> parse_events(std::istream& in, const ParseOptions& options) {
  std::vector<Event> events;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (is_blank(line)) continue;
    events.push_back(parse_event_line(line, line_number, options));
  }
  if (in.bad()) throw IoError("read failure in event stream");
  return events;
}

MatchRecord parse_match(std::istream& in, const MatchMeta& meta, const ParseOptions& options) {
  return MatchRecord(meta, parse_events(in, options));
}

std::string serialize_event(const Event& e) {
  ordered_json obj;
  obj["match_id"] = e.match_id;
  obj["team_id"] = e.player.team_id;
  obj["player_id"] = e.player.player_id;
  obj["type"] = to_string(e.type);
  if (e.subtype) obj["subtype"] = to_string(*e.subtype);
  auto q = ordered_json::array();
  for (std::size_t i = 0; i < kQualifierCount; ++i) q.push_back(e.qualifiers.test(i));
  obj["q"] = std::move(q);
  obj["x"] = e.start.x;
  obj["y"] = e.start.y;
  if (e.end) {
    obj["end_x"] = e.end->x;
    obj["end_y"] = e.end->y;
  }
  obj["minute"] = e.minute;
  return obj.dump();
}

void serialize_events(std::ostream& out, std::span<const Event> events) {
  for (const auto& e : events) out << serialize_event(e) << '\n';
}

MatchMeta parse_meta_line(std::string_view line, std::size_t line_number) {
  const json obj = parse_json_object(line, line_number);
  MatchMeta meta;
  meta.match_id = string_field(obj, "match_id", line_number);
  meta.competition_id = string_field(obj, "competition_id", line_number);
  auto minutes = obj.find("minutes");
  if (minutes == obj.end() || !minutes->is_object()) {
    throw ParseError(line_number, "malformed record: missing object field 'minutes'");
  }
  for (const auto& [player, value] : minutes->items()) {
    if (!value.is_number() || !(value.get<double>() >= 0.0)) {
      throw ParseError(line_number, "malformed record: minutes for '" + player + "' must be a non-negative number");
    }
    meta.minutes.emplace(player, value.get<double>());
  }
  return meta;
}

std::vector<MatchMeta> parse_meta(std::istream& in) {
  std::vector<MatchMeta> out;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (is_blank(line)) continue;
    out.push_back(parse_meta_line(line, line_number));
  }
  if (in.bad()) throw IoError("read failure in match metadata");
  return out;
}

std::string serialize_meta(const MatchMeta& meta) {
  ordered_json obj;
  obj["match_id"] = meta.match_id;
  obj["competition_id"] = meta.competition_id;
  ordered_json minutes = ordered_json::object();
  for (const auto& [player, value] : meta.minutes) minutes[player] = value;
  obj["minutes"] = std::move(minutes);
  return obj.dump();
}

}  // namespace rolefinder
