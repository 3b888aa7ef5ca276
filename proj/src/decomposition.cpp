#include "eml/decomposition.hpp"

#include <algorithm>
#include <functional>
#include <ostream>

#include <fmt/format.h>

namespace eml {

std::vector<int> k_shell(const Graph& g) {
  const NodeId n = g.node_count();
  std::vector<int> deg(n);
  int max_deg = 0;
  for (NodeId u = 0; u < n; ++u) {
    deg[u] = static_cast<int>(g.neighbors(u).size());
    max_deg = std::max(max_deg, deg[u]);
  }

  // Nodes sorted by current degree; bin_start[d] is the first slot of degree d.
  std::vector<int> bin_start(max_deg + 2, 0);
  for (NodeId u = 0; u < n; ++u) ++bin_start[deg[u] + 1];
  for (int d = 0; d <= max_deg; ++d) bin_start[d + 1] += bin_start[d];
  std::vector<NodeId> order(n);
  std::vector<int> pos(n);
  {
    std::vector<int> next(bin_start.begin(), bin_start.end() - 1);
    for (NodeId u = 0; u < n; ++u) {
      pos[u] = next[deg[u]]++;
      order[pos[u]] = u;
    }
  }

  for (int i = 0; i < n; ++i) {
    NodeId u = order[i];
    for (NodeId v : g.neighbors(u)) {
      if (deg[v] > deg[u]) {
        // Swap v with the first node of its bin, then shrink that bin.
        int dv = deg[v];
        int pv = pos[v];
        int pw = bin_start[dv];
        NodeId w = order[pw];
        if (v != w) {
          order[pv] = w;
          pos[w] = pv;
          order[pw] = v;
          pos[v] = pw;
        }
        ++bin_start[dv];
        --deg[v];
      }
    }
  }
  return deg;
}

int h_index(const Graph& g, NodeId u) {
  if (!g.contains(u)) throw std::out_of_range(fmt::format("node id {} out of range", u));
  auto nb = g.neighbors(u);
  std::vector<std::size_t> d;
  d.reserve(nb.size());
  for (NodeId v : nb) d.push_back(g.neighbors(v).size());
  std::sort(d.begin(), d.end(), std::greater<>());
  int h = 0;
  while (h < static_cast<int>(d.size()) && d[h] >= static_cast<std::size_t>(h + 1)) ++h;
  return h;
}

std::vector<int> h_index_all(const Graph& g) {
  std::vector<int> h(g.node_count());
  for (NodeId u = 0; u < g.node_count(); ++u) h[u] = h_index(g, u);
  return h;
}

Vector extended_coreness(const Graph& g, const std::vector<int>& ks) {
  const NodeId n = g.node_count();
  if (static_cast<NodeId>(ks.size()) != n) throw Error("extended_coreness: ks size mismatch");
  Vector weighted(n);
  for (NodeId u = 0; u < n; ++u) {
    weighted[u] = static_cast<double>(ks[u]) * static_cast<double>(g.neighbors(u).size());
  }
  Vector eks = weighted;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v : g.neighbors(u)) eks[u] += weighted[v];
  }
  return eks;
}

CorenessTable coreness_table(const Graph& g) {
  CorenessTable t;
  t.ks = k_shell(g);
  t.eks = extended_coreness(g, t.ks);
  return t;
}

void write_coreness_csv(const Graph& g, std::ostream& out) {
  auto t = coreness_table(g);
  auto h = h_index_all(g);
  out << "node_label,degree,ks,h_index,eks\n";
  for (NodeId u = 0; u < g.node_count(); ++u) {
    out << fmt::format("{},{},{},{},{}\n", g.label(u), g.degree(u), t.ks[u], h[u], t.eks[u]);
  }
}

}  // namespace eml
