#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "rolefinder/errors.hpp"
#include "rolefinder/role_graph.hpp"

using namespace rolefinder;

TEST(RoleGraph, ShippedAdjacency) {
  const auto& g = default_role_graph();
  EXPECT_EQ(g.roles().size(), 21u);
  for (auto r : kMidfielderRoles) {
    ASSERT_TRUE(g.contains(r)) << r;
    EXPECT_EQ(g.role(r).position, Position::central_midfielder);
  }
  EXPECT_TRUE(g.connected("BWM", "HM"));
  EXPECT_TRUE(g.connected("HM", "DLP"));
  EXPECT_TRUE(g.connected("DLP", "AP"));
  EXPECT_TRUE(g.connected("BWM", "BTB"));
  EXPECT_TRUE(g.connected("BTB", "AP"));
  EXPECT_FALSE(g.connected("AP", "HM"));
  EXPECT_FALSE(g.connected("BWM", "CD"));
  EXPECT_TRUE(g.connected("FB", "WB"));
  EXPECT_TRUE(g.connected("WB", "WNG"));

  std::set<Position> groups;
  for (const auto& r : g.roles()) groups.insert(r.position);
  EXPECT_EQ(groups.size(), 6u);
}

TEST(RoleGraph, SymmetricWithoutSelfEdges) {
  const auto& g = default_role_graph();
  for (const auto& a : g.roles()) {
    EXPECT_FALSE(g.connected(a.id, a.id));
    for (const auto& b : g.roles()) EXPECT_EQ(g.connected(a.id, b.id), g.connected(b.id, a.id));
  }
  for (const auto& [a, b] : g.edges()) EXPECT_LT(a, b);
}

TEST(RoleGraph, JsonRoundTrip) {
  const auto& g = default_role_graph();
  const auto again = parse_role_graph(role_graph_to_json(g));
  EXPECT_EQ(again.roles(), g.roles());
  EXPECT_EQ(again.edges(), g.edges());
}

TEST(RoleGraph, InvalidGraphs) {
  std::vector<RoleInfo> roles;
  for (auto m : kMidfielderRoles) roles.push_back({std::string(m), std::string(m), Position::central_midfielder});
  roles.push_back({"A", "a", Position::forward});
  EXPECT_NO_THROW(RoleGraph(roles, {{"A", "BWM"}}));
  EXPECT_THROW(RoleGraph(roles, {{"A", "A"}}), ValidationError);
  EXPECT_THROW(RoleGraph(roles, {{"A", "Z"}}), ValidationError);
  auto dup = roles;
  dup.push_back({"A", "b", Position::forward});
  EXPECT_THROW(RoleGraph(dup, {}), ValidationError);
  auto no_ap = roles;
  no_ap.erase(no_ap.begin() + 4);
  EXPECT_THROW(RoleGraph(no_ap, {}), ValidationError);
}

TEST(Labels, CsvRoundTripAndDuplicates) {
  LabelSet labels;
  labels.roles = {{"p1", "BWM"}, {"p2", "AP"}};
  labels.provenance = "synthetic";
  std::ostringstream out;
  write_labels(out, labels);
  std::istringstream in(out.str());
  EXPECT_EQ(read_labels(in), labels);

  std::istringstream dup("player_id,role\np1,BWM\np1,AP\n");
  EXPECT_THROW(read_labels(dup), ValidationError);

  LabelSet unknown;
  unknown.roles = {{"p1", "XYZ"}};
  EXPECT_THROW(validate_labels(unknown, default_role_graph()), ValidationError);
}
