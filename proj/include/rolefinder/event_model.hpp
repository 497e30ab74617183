#pragma once

// Canonical play-by-play event schema, pitch zones and the JSON-lines ingest format.
//
// Coordinates are normalized to [0,100]^2: x runs from the acting team's own
// goal line (0) to the opponent's (100), y from the left touchline (0) to the
// right one (100).

#include <bitset>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rolefinder {

enum class EventType : std::uint8_t {
  pass,
  shot,
  cross,
  tackle,
  interception,
  duel,
  save,
  clearance,
  touch,
  foul,
  other,
};

inline constexpr std::size_t kEventTypeCount = 11;

std::string_view to_string(EventType type);
std::optional<EventType> event_type_from_string(std::string_view name);

// Directional events may carry an end location.
constexpr bool is_directional(EventType type) {
  return type == EventType::pass || type == EventType::cross || type == EventType::clearance ||
         type == EventType::shot;
}

enum class Subtype : std::uint8_t {
  simple_pass,
  long_pass,
  high_pass,
  smart_pass,
  launch,
  ground_attacking_duel,
  ground_defending_duel,
  ground_loose_ball_duel,
  aerial_duel,
  reflex_save,
  save_attempt,
  free_kick,
  corner,
  throw_in,
  penalty,
  acceleration,
  other,
};

std::string_view to_string(Subtype subtype);
std::optional<Subtype> subtype_from_string(std::string_view name);

inline constexpr std::size_t kQualifierCount = 59;
using Qualifiers = std::bitset<kQualifierCount>;

// Positions of the named qualifier slots. Slots without a name are reserved.
namespace qualifier {
inline constexpr std::size_t accurate = 0;
inline constexpr std::size_t inaccurate = 1;
inline constexpr std::size_t left_foot = 2;
inline constexpr std::size_t right_foot = 3;
inline constexpr std::size_t header = 4;
inline constexpr std::size_t through_ball = 5;
inline constexpr std::size_t key_pass = 6;
inline constexpr std::size_t assist = 7;
inline constexpr std::size_t goal = 8;
inline constexpr std::size_t won = 9;
inline constexpr std::size_t lost = 10;
inline constexpr std::size_t long_ball = 11;
inline constexpr std::size_t counter_attack = 12;
inline constexpr std::size_t progressive = 13;
inline constexpr std::size_t opportunity = 14;
inline constexpr std::size_t blocked = 15;
inline constexpr std::size_t dangerous_ball_lost = 16;
inline constexpr std::size_t high = 17;
inline constexpr std::size_t low = 18;
inline constexpr std::size_t free_space_left = 19;
inline constexpr std::size_t free_space_right = 20;
inline constexpr std::size_t sliding_tackle = 21;
inline constexpr std::size_t recovery = 22;
inline constexpr std::size_t red_card = 23;
inline constexpr std::size_t yellow_card = 24;
}  // namespace qualifier

// All 59 slot names in order; reserved slots are named "reserved_<index>".
std::span<const std::string> qualifier_manifest();
std::optional<std::size_t> qualifier_index(std::string_view name);

struct PitchPoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const PitchPoint&, const PitchPoint&) = default;
};

constexpr bool on_pitch(PitchPoint p) {
  return p.x >= 0.0 && p.x <= 100.0 && p.y >= 0.0 && p.y <= 100.0;
}

enum class Zone : std::uint8_t {
  own_half,
  possession_zone,
  final_third,
  opposite_box,
  left_flank,
  right_flank,
  flank,
  central,
};

inline constexpr std::size_t kZoneCount = 8;

std::string_view to_string(Zone zone);
std::optional<Zone> zone_from_string(std::string_view name);

class ZoneSet {
 public:
  constexpr ZoneSet() = default;
  constexpr ZoneSet(std::initializer_list<Zone> zones) {
    for (Zone z : zones) insert(z);
  }

  constexpr void insert(Zone z) { bits_ |= bit(z); }
  constexpr bool contains(Zone z) const { return (bits_ & bit(z)) != 0; }
  constexpr bool contains_all(ZoneSet other) const { return (bits_ & other.bits_) == other.bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  std::vector<Zone> to_vector() const;

  friend constexpr bool operator==(ZoneSet, ZoneSet) = default;

 private:
  static constexpr std::uint16_t bit(Zone z) {
    return static_cast<std::uint16_t>(1u << static_cast<unsigned>(z));
  }
  std::uint16_t bits_ = 0;
};

// Zone boundaries of the normalized pitch. Zones overlap.
struct ZoneBounds {
  static constexpr double own_half_end = 50.0;        // own_half: x < 50
  static constexpr double possession_begin = 33.3;    // possession_zone: 33.3 <= x <= 66.6
  static constexpr double possession_end = 66.6;
  static constexpr double final_third_begin = 66.6;   // final_third: x >= 66.6
  static constexpr double box_begin = 84.0;           // opposite_box: x >= 84 and 21 <= y <= 79
  static constexpr double box_lateral_low = 21.0;
  static constexpr double box_lateral_high = 79.0;
  static constexpr double left_flank_end = 21.0;      // left_flank: y <= 21
  static constexpr double right_flank_begin = 79.0;   // right_flank: y >= 79
};

// Pure; `p` must be on the pitch.
ZoneSet zone_of(PitchPoint p);

struct PlayerRef {
  std::string player_id;
  std::string team_id;

  friend bool operator==(const PlayerRef&, const PlayerRef&) = default;
};

struct Event {
  std::string match_id;
  PlayerRef player;
  EventType type = EventType::other;
  std::optional<Subtype> subtype;
  Qualifiers qualifiers;
  PitchPoint start;
  std::optional<PitchPoint> end;
  double minute = 0.0;

  bool has(std::size_t qualifier_slot) const { return qualifiers.test(qualifier_slot); }

  friend bool operator==(const Event&, const Event&) = default;
};

// Throws ValidationError when an Event invariant is broken.
void validate_event(const Event& event);

struct MatchMeta {
  std::string match_id;
  std::string competition_id;
  std::map<std::string, double> minutes;  // player_id -> minutes played

  friend bool operator==(const MatchMeta&, const MatchMeta&) = default;
};

// One validated match. Immutable after construction; events are stably sorted by minute.
class MatchRecord {
 public:
  MatchRecord(MatchMeta meta, std::vector<Event> events);

  const std::string& match_id() const { return meta_.match_id; }
  const std::string& competition_id() const { return meta_.competition_id; }
  const std::vector<Event>& events() const { return events_; }
  const std::map<std::string, double>& minutes() const { return meta_.minutes; }
  const MatchMeta& meta() const { return meta_; }

 private:
  MatchMeta meta_;
  std::vector<Event> events_;
};

struct ParseOptions {
  // Reject unknown event types/subtypes instead of mapping them to `other`.
  bool strict = false;
};

// Parses one ingest line. Throws ParseError carrying `line_number`.
Event parse_event_line(std::string_view line, std::size_t line_number,
                       const ParseOptions& options = {});

// Parses a JSON-lines event stream. Blank lines are skipped.
std::vector<Event> parse_events(std::istream& in, const ParseOptions& options = {});

// Parses the events of a single match and attaches its metadata.
MatchRecord parse_match(std::istream& in, const MatchMeta& meta, const ParseOptions& options = {});

// Canonical single-line form (fixed key order, no whitespace, no trailing newline).
std::string serialize_event(const Event& event);
void serialize_events(std::ostream& out, std::span<const Event> events);

MatchMeta parse_meta_line(std::string_view line, std::size_t line_number);
std::vector<MatchMeta> parse_meta(std::istream& in);
std::string serialize_meta(const MatchMeta& meta);

}  // namespace rolefinder
