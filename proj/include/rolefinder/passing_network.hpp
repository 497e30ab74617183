#pragma once

// Directed, weighted passing network of one team. Edge weight = completed
// passes from one player to another; for shortest paths an edge of weight w has
// length max_weight / w, so the strongest connection has length 1.

#include <cstddef>
#include <vector>

namespace rolefinder {

class PassGraph {
 public:
  explicit PassGraph(std::size_t nodes) : n_(nodes), weights_(nodes * nodes, 0.0) {}

  std::size_t size() const { return n_; }
  void add_pass(std::size_t from, std::size_t to, double count = 1.0);
  double weight(std::size_t from, std::size_t to) const { return weights_[from * n_ + to]; }
  double total_weight() const;
  double max_weight() const;
  // Shortest-path length of the edge from -> to; only meaningful when weight > 0.
  double length(std::size_t from, std::size_t to) const { return max_weight() / weight(from, to); }

 private:
  std::size_t n_;
  std::vector<double> weights_;
};

// Share of the team's completed passes played / received by each node.
std::vector<double> out_pass_share(const PassGraph& g);
std::vector<double> in_pass_share(const PassGraph& g);
// (out + in) / (2 * total); sums to 1 over a team with at least one pass.
std::vector<double> degree_centrality(const PassGraph& g);

// Brandes betweenness on the weighted digraph, normalized by (n-1)(n-2).
std::vector<double> betweenness_centrality(const PassGraph& g);

// Harmonic out-closeness: mean over other nodes of 1 / distance. In [0, 1].
std::vector<double> closeness_centrality(const PassGraph& g);

}  // namespace rolefinder
