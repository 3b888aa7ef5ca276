#include "eml/generators.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace eml::gen {

Graph path(NodeId n) {
  std::vector<Edge> e;
  for (NodeId i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return Graph::from_edges(n, e);
}

Graph cycle(NodeId n) {
  std::vector<Edge> e;
  for (NodeId i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return Graph::from_edges(n, e);
}

Graph star(NodeId leaves) {
  std::vector<Edge> e;
  for (NodeId i = 1; i <= leaves; ++i) e.emplace_back(0, i);
  return Graph::from_edges(leaves + 1, e);
}

Graph complete(NodeId n) {
  std::vector<Edge> e;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return Graph::from_edges(n, e);
}

Graph random_gnm(NodeId n, std::size_t m, std::uint64_t seed) {
  const auto max_edges = static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2;
  if (m > max_edges) throw Error("random_gnm: too many edges requested");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<NodeId> pick(0, n - 1);
  std::set<Edge> chosen;
  while (chosen.size() < m) {
    NodeId u = pick(rng), v = pick(rng);
    if (u == v) continue;
    chosen.emplace(std::min(u, v), std::max(u, v));
  }
  std::vector<Edge> e(chosen.begin(), chosen.end());
  return Graph::from_edges(n, e);
}

Graph preferential_attachment(NodeId n, double avg_degree, std::uint64_t seed) {
  if (avg_degree < 2.0) throw Error("preferential_attachment: avg_degree must be >= 2");
  const double links = avg_degree / 2.0;
  const auto lo = static_cast<NodeId>(std::floor(links));
  const double frac = links - lo;
  const NodeId core = std::max<NodeId>(lo + 2, 3);
  if (n < core) throw Error("preferential_attachment: n too small");

  std::mt19937_64 rng(seed);
  std::bernoulli_distribution extra(frac);
  std::vector<Edge> edges;
  std::vector<NodeId> endpoints;  // each node repeated once per incident edge
  for (NodeId i = 0; i < core; ++i) {
    for (NodeId j = i + 1; j < core; ++j) {
      edges.emplace_back(i, j);
      endpoints.push_back(i);
      endpoints.push_back(j);
    }
  }
  std::vector<NodeId> targets;
  for (NodeId u = core; u < n; ++u) {
    NodeId want = std::min<NodeId>(lo + (extra(rng) ? 1 : 0), u);
    targets.clear();
    while (static_cast<NodeId>(targets.size()) < want) {
      std::uniform_int_distribution<std::size_t> pick(0, endpoints.size() - 1);
      NodeId v = endpoints[pick(rng)];
      if (std::find(targets.begin(), targets.end(), v) == targets.end()) targets.push_back(v);
    }
    for (NodeId v : targets) {
      edges.emplace_back(v, u);
      endpoints.push_back(v);
      endpoints.push_back(u);
    }
  }
  return Graph::from_edges(n, edges);
}

}  // namespace eml::gen
