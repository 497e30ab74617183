#include "rolefinder/passing_network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "rolefinder/errors.hpp"

namespace rolefinder {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Path lengths are sums of ratios of integers; equal paths can differ in the last bits.
constexpr double kTieTolerance = 1e-9;

bool nearly_equal(double a, double b) {
  return std::abs(a - b) <= kTieTolerance * std::max({1.0, std::abs(a), std::abs(b)});
}

struct ShortestPaths {
  std::vector<double> dist;
  std::vector<double> sigma;                    // number of shortest paths
  std::vector<std::vector<std::size_t>> preds;  // predecessors on shortest paths
  std::vector<std::size_t> order;               // nodes by non-decreasing distance
};

ShortestPaths dijkstra(const PassGraph& g, std::size_t source) {
  const std::size_t n = g.size();
  const double max_w = g.max_weight();
  ShortestPaths sp{std::vector<double>(n, kInf), std::vector<double>(n, 0.0),
                   std::vector<std::vector<std::size_t>>(n), {}};
  std::vector<bool> done(n, false);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  sp.dist[source] = 0.0;
  sp.sigma[source] = 1.0;
  queue.emplace(0.0, source);
  while (!queue.empty()) {
    auto [d, u] = queue.top();
    queue.pop();
    if (done[u]) continue;
    done[u] = true;
    sp.order.push_back(u);
    for (std::size_t v = 0; v < n; ++v) {
      const double w = g.weight(u, v);
      if (v == u || w <= 0.0 || done[v]) continue;
      const double candidate = d + max_w / w;
      if (sp.dist[v] == kInf || (candidate < sp.dist[v] && !nearly_equal(candidate, sp.dist[v]))) {
        sp.dist[v] = candidate;
        sp.sigma[v] = sp.sigma[u];
        sp.preds[v].assign(1, u);
        queue.emplace(candidate, v);
      } else if (nearly_equal(candidate, sp.dist[v])) {
        sp.sigma[v] += sp.sigma[u];
        sp.preds[v].push_back(u);
      }
    }
  }
  return sp;
}

}  // namespace

void PassGraph::add_pass(std::size_t from, std::size_t to, double count) {
  if (from >= n_ || to >= n_) throw InvariantError("pass graph node out of range");
  if (from == to || count <= 0.0) return;
  weights_[from * n_ + to] += count;
}

double PassGraph::total_weight() const {
  double s = 0.0;
  for (double w : weights_) s += w;
  return s;
}

double PassGraph::max_weight() const {
  return weights_.empty() ? 0.0 : *std::max_element(weights_.begin(), weights_.end());
}

std::vector<double> out_pass_share(const PassGraph& g) {
  const double total = g.total_weight();
  std::vector<double> out(g.size(), 0.0);
  if (total <= 0.0) return out;
  for (std::size_t u = 0; u < g.size(); ++u) {
    for (std::size_t v = 0; v < g.size(); ++v) out[u] += g.weight(u, v);
    out[u] /= total;
  }
  return out;
}

std::vector<double> in_pass_share(const PassGraph& g) {
  const double total = g.total_weight();
  std::vector<double> in(g.size(), 0.0);
  if (total <= 0.0) return in;
  for (std::size_t v = 0; v < g.size(); ++v) {
    for (std::size_t u = 0; u < g.size(); ++u) in[v] += g.weight(u, v);
    in[v] /= total;
  }
  return in;
}

std::vector<double> degree_centrality(const PassGraph& g) {
  auto out = out_pass_share(g);
  const auto in = in_pass_share(g);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = 0.5 * (out[i] + in[i]);
  return out;
}

std::vector<double> betweenness_centrality(const PassGraph& g) {
  const std::size_t n = g.size();
  std::vector<double> bc(n, 0.0);
  if (n < 3 || g.total_weight() <= 0.0) return bc;
  for (std::size_t s = 0; s < n; ++s) {
    const auto sp = dijkstra(g, s);
    std::vector<double> delta(n, 0.0);
    for (auto it = sp.order.rbegin(); it != sp.order.rend(); ++it) {
      const std::size_t w = *it;
      for (std::size_t v : sp.preds[w]) delta[v] += sp.sigma[v] / sp.sigma[w] * (1.0 + delta[w]);
      if (w != s) bc[w] += delta[w];
    }
  }
  const double norm = static_cast<double>((n - 1) * (n - 2));
  for (double& b : bc) b /= norm;
  return bc;
}

std::vector<double> closeness_centrality(const PassGraph& g) {
  const std::size_t n = g.size();
  std::vector<double> cc(n, 0.0);
  if (n < 2 || g.total_weight() <= 0.0) return cc;
  for (std::size_t s = 0; s < n; ++s) {
    const auto sp = dijkstra(g, s);
    double sum = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      if (v != s && sp.dist[v] != kInf) sum += 1.0 / sp.dist[v];
    }
    cc[s] = sum / static_cast<double>(n - 1);
  }
  return cc;
}

}  // namespace rolefinder
