#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rolefinder {

enum class Position : std::uint8_t { goalkeeper, defender, back, central_midfielder, winger, forward };

std::string_view to_string(Position p);

struct RoleInfo {
  std::string id;
  std::string name;
  Position position = Position::central_midfielder;

  friend bool operator==(const RoleInfo&, const RoleInfo&) = default;
};

// Roles and the undirected "connected" relation between roles that share tasks.
class RoleGraph {
 public:
  RoleGraph(std::vector<RoleInfo> roles, std::vector<std::pair<std::string, std::string>> edges);

  const std::vector<RoleInfo>& roles() const { return roles_; }
  bool contains(std::string_view role) const;
  const RoleInfo& role(std::string_view id) const;
  bool connected(std::string_view a, std::string_view b) const;
  std::vector<std::string> neighbours(std::string_view role) const;
  // Each undirected edge once, as (smaller id, larger id).
  std::vector<std::pair<std::string, std::string>> edges() const;

 private:
  std::vector<RoleInfo> roles_;
  std::set<std::pair<std::string, std::string>> edges_;  // stored in both directions
};

inline constexpr std::string_view kMidfielderRoles[] = {"BWM", "HM", "DLP", "BTB", "AP"};

RoleGraph parse_role_graph(std::string_view json_text);
std::string role_graph_to_json(const RoleGraph& graph);
// The shipped 21-role adjacency (an interpretation; overridable from a file).
const RoleGraph& default_role_graph();

// player_id -> primary role.
struct LabelSet {
  std::map<std::string, std::string> roles;
  std::string provenance = "expert";

  friend bool operator==(const LabelSet&, const LabelSet&) = default;
};

// CSV "player_id,role[,provenance]" with a header row. Duplicate players are an error.
LabelSet read_labels(std::istream& in);
void write_labels(std::ostream& out, const LabelSet& labels);
// Throws ValidationError if a label names a role missing from `graph`.
void validate_labels(const LabelSet& labels, const RoleGraph& graph);

}  // namespace rolefinder
