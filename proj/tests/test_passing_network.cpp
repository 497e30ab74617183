#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "rolefinder/passing_network.hpp"
#include "rolefinder/seed.hpp"

using namespace rolefinder;

namespace {

// Enumerates every simple path; shortest ones are those within 1e-9 of the minimum.
struct BruteForce {
  const PassGraph& g;
  std::vector<double> betweenness;
  std::vector<std::vector<double>> dist;

  explicit BruteForce(const PassGraph& graph)
      : g(graph),
        betweenness(graph.size(), 0.0),
        dist(graph.size(), std::vector<double>(graph.size(), std::numeric_limits<double>::infinity())) {
    const std::size_t n = g.size();
    double max_w = 0;
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = 0; v < n; ++v) max_w = std::max(max_w, g.weight(u, v));
    for (std::size_t s = 0; s < n; ++s) {
      std::vector<std::vector<std::pair<double, std::vector<std::size_t>>>> paths(n);
      std::vector<std::size_t> stack = {s};
      std::vector<bool> seen(n, false);
      seen[s] = true;
      walk(s, 0.0, max_w, stack, seen, paths);
      for (std::size_t t = 0; t < n; ++t) {
        if (t == s || paths[t].empty()) continue;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& p : paths[t]) best = std::min(best, p.first);
        dist[s][t] = best;
        std::vector<double> through(n, 0.0);
        double total = 0;
        for (const auto& [len, nodes] : paths[t]) {
          if (std::abs(len - best) > 1e-9 * std::max(1.0, best)) continue;
          total += 1;
          for (std::size_t i = 1; i + 1 < nodes.size(); ++i) through[nodes[i]] += 1;
        }
        for (std::size_t v = 0; v < n; ++v) betweenness[v] += through[v] / total;
      }
    }
    if (n > 2)
      for (double& b : betweenness) b /= static_cast<double>((n - 1) * (n - 2));
  }

  void walk(std::size_t u, double len, double max_w, std::vector<std::size_t>& stack, std::vector<bool>& seen,
            std::vector<std::vector<std::pair<double, std::vector<std::size_t>>>>& paths) {
    for (std::size_t v = 0; v < g.size(); ++v) {
      if (seen[v] || g.weight(u, v) <= 0) continue;
      const double l = len + max_w / g.weight(u, v);
      stack.push_back(v);
      seen[v] = true;
      paths[v].emplace_back(l, stack);
      walk(v, l, max_w, stack, seen, paths);
      seen[v] = false;
      stack.pop_back();
    }
  }

  double closeness(std::size_t s) const {
    double sum = 0;
    for (std::size_t t = 0; t < g.size(); ++t)
      if (t != s && std::isfinite(dist[s][t])) sum += 1.0 / dist[s][t];
    return sum / static_cast<double>(g.size() - 1);
  }
};

PassGraph random_graph(Rng& rng, std::size_t n, double density) {
  PassGraph g(n);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v)
      if (u != v && uniform01(rng) < density) g.add_pass(u, v, 1.0 + static_cast<double>(uniform_index(rng, 4)));
  return g;
}

}  // namespace

TEST(PassingNetwork, TwoNodePath) {
  PassGraph g(2);
  g.add_pass(0, 1, 7);
  EXPECT_EQ(out_pass_share(g), (std::vector<double>{1.0, 0.0}));
  EXPECT_EQ(in_pass_share(g), (std::vector<double>{0.0, 1.0}));
  EXPECT_EQ(betweenness_centrality(g), (std::vector<double>{0.0, 0.0}));
}

TEST(PassingNetwork, StarHubHasMaximalBetweenness) {
  PassGraph g(5);
  for (std::size_t s = 1; s < 5; ++s) {
    g.add_pass(0, s, 3);
    g.add_pass(s, 0, 3);
  }
  const auto bc = betweenness_centrality(g);
  const BruteForce oracle(g);
  for (std::size_t v = 0; v < 5; ++v) EXPECT_NEAR(bc[v], oracle.betweenness[v], 1e-12);
  EXPECT_DOUBLE_EQ(bc[0], 1.0);
  for (std::size_t s = 1; s < 5; ++s) EXPECT_LT(bc[s], bc[0]);
}

TEST(PassingNetwork, DegreeSharesSumToOne) {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = random_graph(rng, 2 + uniform_index(rng, 7), 0.5);
    if (g.total_weight() == 0) continue;
    double sum = 0;
    for (double d : degree_centrality(g)) sum += d;
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(PassingNetwork, MatchesBruteForceUpToEightNodes) {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + uniform_index(rng, 6);
    const auto g = random_graph(rng, n, 0.2 + 0.6 * uniform01(rng));
    const BruteForce oracle(g);
    const auto bc = betweenness_centrality(g);
    const auto cc = closeness_centrality(g);
    for (std::size_t v = 0; v < n; ++v) {
      EXPECT_NEAR(bc[v], oracle.betweenness[v], 1e-9) << "trial " << trial << " node " << v;
      if (g.total_weight() > 0) EXPECT_NEAR(cc[v], oracle.closeness(v), 1e-12) << "trial " << trial;
      EXPECT_GE(cc[v], 0.0);
      EXPECT_LE(cc[v], 1.0);
    }
  }
}

TEST(PassingNetwork, TiedPathsSplitCredit) {
  // 0 -> {1, 2} -> 3 with equal weights: 1 and 2 each carry half of the 0->3 path.
  PassGraph g(4);
  g.add_pass(0, 1);
  g.add_pass(0, 2);
  g.add_pass(1, 3);
  g.add_pass(2, 3);
  const auto bc = betweenness_centrality(g);
  EXPECT_DOUBLE_EQ(bc[1], 0.5 / 6.0);
  EXPECT_DOUBLE_EQ(bc[2], 0.5 / 6.0);
  EXPECT_EQ(bc[0], 0.0);
  EXPECT_EQ(bc[3], 0.0);
}

TEST(PassingNetwork, StrongerLinksAreShorter) {
  PassGraph g(3);
  g.add_pass(0, 1, 4);
  g.add_pass(1, 2, 4);
  g.add_pass(0, 2, 1);
  EXPECT_EQ(g.length(0, 1), 1.0);
  EXPECT_EQ(g.length(0, 2), 4.0);
  // 0 -> 1 -> 2 has length 2 < 4, so 1 lies on the only shortest 0 -> 2 path.
  EXPECT_DOUBLE_EQ(betweenness_centrality(g)[1], 1.0 / 2.0);
}

TEST(PassingNetwork, SelfPassesIgnored) {
  PassGraph g(2);
  g.add_pass(0, 0, 5);
  EXPECT_EQ(g.total_weight(), 0.0);
}
