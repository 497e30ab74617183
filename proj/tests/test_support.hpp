#pragma once

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "rolefinder/event_model.hpp"
#include "rolefinder/seed.hpp"

namespace rolefinder::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("rolefinder_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline Event make_event(const std::string& player, const std::string& team, EventType type, double x, double y,
                        std::initializer_list<std::size_t> flags = {}, double minute = 1.0,
                        std::string match = "m1") {
  Event e;
  e.match_id = std::move(match);
  e.player = {player, team};
  e.type = type;
  for (std::size_t f : flags) e.qualifiers.set(f);
  e.start = {x, y};
  e.minute = minute;
  return e;
}

inline Event accurate_pass(const std::string& player, const std::string& team, double minute) {
  Event e = make_event(player, team, EventType::pass, 50, 50, {qualifier::accurate}, minute);
  e.subtype = Subtype::simple_pass;
  e.end = PitchPoint{55, 50};
  return e;
}

inline MatchRecord make_match(std::vector<Event> events, std::map<std::string, double> minutes,
                              std::string match = "m1", std::string competition = "c1") {
  for (auto& e : events) e.match_id = match;
  return MatchRecord({std::move(match), std::move(competition), std::move(minutes)}, std::move(events));
}

inline std::vector<double> random_vector(Rng& rng, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (auto& x : v) x = lo + (hi - lo) * uniform01(rng);
  return v;
}

}  // namespace rolefinder::testing
