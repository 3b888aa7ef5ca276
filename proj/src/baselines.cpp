#include "eml/baselines.hpp"

#include <algorithm>

#include "eml/decomposition.hpp"

namespace eml {

namespace {

template <typename T>
Vector to_vector(const std::vector<T>& v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = static_cast<double>(v[i]);
  return out;
}

// Calls visit(x) for every node x at distance 1 or 2 from u, each once.
template <typename Visit>
void for_two_hop(const Graph& g, NodeId u, std::vector<NodeId>& mark, Visit&& visit) {
  mark[u] = u;
  for (NodeId v : g.neighbors(u)) {
    if (mark[v] != u) {
      mark[v] = u;
      visit(v);
    }
  }
  for (NodeId v : g.neighbors(u)) {
    for (NodeId w : g.neighbors(v)) {
      if (mark[w] != u) {
        mark[w] = u;
        visit(w);
      }
    }
  }
}

std::size_t common_neighbours(std::span<const NodeId> a, std::span<const NodeId> b) {
  std::size_t c = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++c;
      ++i;
      ++j;
    }
  }
  return c;
}

}  // namespace

Vector degree_centrality(const Graph& g) {
  Vector s(g.node_count());
  for (NodeId u = 0; u < g.node_count(); ++u) s[u] = static_cast<double>(g.neighbors(u).size());
  return s;
}

Vector ks_centrality(const Graph& g) { return to_vector(k_shell(g)); }

Vector h_index_centrality(const Graph& g) { return to_vector(h_index_all(g)); }

Vector local_h_index(const Graph& g) {
  const Vector h = h_index_centrality(g);
  Vector s = h;
  for (NodeId u = 0; u < g.node_count(); ++u)
    for (NodeId v : g.neighbors(u)) s[u] += h[v];
  return s;
}

Vector local_rank(const Graph& g) {
  const NodeId n = g.node_count();
  std::vector<NodeId> mark(static_cast<std::size_t>(n), -1);
  Vector reach(n);
  for (NodeId w = 0; w < n; ++w) {
    std::size_t count = 0;
    for_two_hop(g, w, mark, [&](NodeId) { ++count; });
    reach[w] = static_cast<double>(count);
  }
  Vector q = Vector::Zero(n);  // Q(v) = sum of reach over N(v)
  for (NodeId v = 0; v < n; ++v)
    for (NodeId w : g.neighbors(v)) q[v] += reach[w];
  Vector s = Vector::Zero(n);
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v : g.neighbors(u)) s[u] += q[v];
  return s;
}

Vector cnc(const Graph& g) {
  const auto ks = k_shell(g);
  Vector s = Vector::Zero(g.node_count());
  for (NodeId u = 0; u < g.node_count(); ++u)
    for (NodeId v : g.neighbors(u)) s[u] += ks[v];
  return s;
}

Vector extended_kshell_sum(const Graph& g) {
  const auto ks = k_shell(g);
  const NodeId n = g.node_count();
  std::vector<NodeId> mark(static_cast<std::size_t>(n), -1);
  Vector s = Vector::Zero(n);
  for (NodeId u = 0; u < n; ++u) for_two_hop(g, u, mark, [&](NodeId x) { s[u] += ks[x]; });
  return s;
}

Vector link_significance(const Graph& g) {
  const auto ks = k_shell(g);
  Vector s = Vector::Zero(g.node_count());
  for (NodeId u = 0; u < g.node_count(); ++u) {
    const auto nu = g.neighbors(u);
    for (NodeId v : nu) {
      const auto nv = g.neighbors(v);
      const auto inter = common_neighbours(nu, nv);
      const auto uni = nu.size() + nv.size() - inter;
      const double ls = 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
      s[u] += ls * ks[v];
    }
  }
  return s;
}

Vector ds_centrality(const Graph& g, double beta, int t) {
  if (t < 1) throw Error("ds_centrality: horizon t must be >= 1");
  if (!(beta >= 0.0)) throw Error("ds_centrality: beta must be >= 0");
  const Eigen::SparseMatrix<double> a = g.adjacency_matrix();
  Vector walk = Vector::Ones(g.node_count());
  Vector score = Vector::Zero(g.node_count());
  double weight = 1.0;
  for (int k = 1; k <= t; ++k) {
    walk = a * walk;
    weight *= beta;
    score += weight * walk;
  }
  return score;
}

const std::vector<std::string>& baseline_names() {
  static const std::vector<std::string> names{"degree", "ks", "hindex", "lh", "localrank",
                                              "cnc",    "eks-sum", "ls", "ds"};
  return names;
}

bool is_static_baseline(std::string_view name) {
  const auto& names = baseline_names();
  return name != "ds" && std::find(names.begin(), names.end(), name) != names.end();
}

CentralityResult compute_baseline(std::string_view name, const Graph& g, const BaselineParams& params) {
  CentralityResult r{std::string(name), {}};
  if (name == "degree") r.scores = degree_centrality(g);
  else if (name == "ks") r.scores = ks_centrality(g);
  else if (name == "hindex") r.scores = h_index_centrality(g);
  else if (name == "lh") r.scores = local_h_index(g);
  else if (name == "localrank") r.scores = local_rank(g);
  else if (name == "cnc") r.scores = cnc(g);
  else if (name == "eks-sum") r.scores = extended_kshell_sum(g);
  else if (name == "ls") r.scores = link_significance(g);
  else if (name == "ds") r.scores = ds_centrality(g, params.beta, params.ds_t);
  else throw Error("unknown method '" + std::string(name) + "'");
  return r;
}

}  // namespace eml
