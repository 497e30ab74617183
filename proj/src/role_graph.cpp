#include "rolefinder/role_graph.hpp"

#include <array>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "rolefinder/errors.hpp"
#include "rolefinder_defaults.hpp"

namespace rolefinder {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr std::string_view kGraphFormat = "rolefinder-role-graph/1";

constexpr std::array<std::string_view, 6> kPositionNames = {
    "goalkeeper", "defender", "back", "central_midfielder", "winger", "forward"};

Position position_from_string(const std::string& s) {
  for (std::size_t i = 0; i < kPositionNames.size(); ++i) {
    if (kPositionNames[i] == s) return static_cast<Position>(i);
  }
  throw ValidationError("role graph: unknown position '" + s + "'");
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    out.push_back(cell);
  }
  return out;
}

}  // namespace

std::string_view to_string(Position p) { return kPositionNames.at(static_cast<std::size_t>(p)); }

RoleGraph::RoleGraph(std::vector<RoleInfo> roles, std::vector<std::pair<std::string, std::string>> edges)
    : roles_(std::move(roles)) {
  std::set<std::string> ids;
  for (const auto& r : roles_) {
    if (r.id.empty()) throw ValidationError("role graph: empty role id");
    if (!ids.insert(r.id).second) throw ValidationError("role graph: duplicate role '" + r.id + "'");
  }
  for (auto m : kMidfielderRoles) {
    if (!ids.contains(std::string(m))) {
      throw ValidationError("role graph: central midfielder role '" + std::string(m) + "' missing");
    }
  }
  for (auto& [a, b] : edges) {
    if (!ids.contains(a) || !ids.contains(b)) {
      throw ValidationError("role graph: edge " + a + "-" + b + " references an unknown role");
    }
    if (a == b) throw ValidationError("role graph: self-edge on '" + a + "'");
    edges_.emplace(a, b);
    edges_.emplace(b, a);
  }
}

bool RoleGraph::contains(std::string_view role) const {
  for (const auto& r : roles_) {
    if (r.id == role) return true;
  }
  return false;
}

const RoleInfo& RoleGraph::role(std::string_view id) const {
  for (const auto& r : roles_) {
    if (r.id == id) return r;
  }
  throw ValidationError("unknown role '" + std::string(id) + "'");
}

bool RoleGraph::connected(std::string_view a, std::string_view b) const {
  return edges_.contains({std::string(a), std::string(b)});
}

std::vector<std::string> RoleGraph::neighbours(std::string_view role) const {
  std::vector<std::string> out;
  for (const auto& r : roles_) {
    if (connected(role, r.id)) out.push_back(r.id);
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> RoleGraph::edges() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [a, b] : edges_) {
    if (a < b) out.emplace_back(a, b);
  }
  return out;
}

RoleGraph parse_role_graph(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("role graph: ") + e.what());
  }
  if (!doc.is_object() || doc.value("format", "") != kGraphFormat) {
    throw ValidationError("role graph: expected \"format\": \"" + std::string(kGraphFormat) + "\"");
  }
  std::vector<RoleInfo> roles;
  for (const auto& r : doc.at("roles")) {
    roles.push_back({r.at("id").get<std::string>(), r.value("name", r.at("id").get<std::string>()),
                     position_from_string(r.at("position").get<std::string>())});
  }
  std::vector<std::pair<std::string, std::string>> edges;
  for (const auto& e : doc.value("edges", json::array())) {
    if (!e.is_array() || e.size() != 2) throw ValidationError("role graph: edges must be [a, b] pairs");
    edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
  }
  return RoleGraph(std::move(roles), std::move(edges));
}

std::string role_graph_to_json(const RoleGraph& graph) {
  ordered_json doc;
  doc["format"] = kGraphFormat;
  auto roles = ordered_json::array();
  for (const auto& r : graph.roles()) {
    roles.push_back(ordered_json{{"id", r.id}, {"name", r.name}, {"position", to_string(r.position)}});
  }
  doc["roles"] = std::move(roles);
  auto edges = ordered_json::array();
  for (const auto& [a, b] : graph.edges()) edges.push_back(ordered_json::array({a, b}));
  doc["edges"] = std::move(edges);
  return doc.dump(2) + "\n";
}

const RoleGraph& default_role_graph() {
  static const RoleGraph graph = parse_role_graph(defaults::kRoleGraphJson);
  return graph;
}

LabelSet read_labels(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("labels file is empty");
  const auto header = split(line);
  if (header.size() < 2 || header[0] != "player_id" || header[1] != "role") {
    throw ValidationError("labels file must start with a 'player_id,role' header");
  }
  LabelSet labels;
  bool provenance_set = false;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line);
    if (cells.size() < 2 || cells[0].empty() || cells[1].empty()) {
      throw ParseError(line_number, "label row needs player_id and role");
    }
    if (!labels.roles.emplace(cells[0], cells[1]).second) {
      throw ParseError(line_number, "player '" + cells[0] + "' has more than one primary role");
    }
    if (cells.size() >= 3 && !provenance_set) {
      labels.provenance = cells[2];
      provenance_set = true;
    }
  }
  return labels;
}

void write_labels(std::ostream& out, const LabelSet& labels) {
  out << "player_id,role,provenance\n";
  for (const auto& [player, role] : labels.roles) out << player << ',' << role << ',' << labels.provenance << '\n';
}

void validate_labels(const LabelSet& labels, const RoleGraph& graph) {
  for (const auto& [player, role] : labels.roles) {
    if (!graph.contains(role)) {
      throw ValidationError("label for '" + player + "' names unknown role '" + role + "'");
    }
  }
}

}  // namespace rolefinder
