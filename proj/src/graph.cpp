#include "eml/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace eml {

Graph Graph::from_edges(std::vector<std::string> labels, std::span<const Edge> edges) {
  const auto n = static_cast<NodeId>(labels.size());
  std::vector<Edge> canon;
  canon.reserve(edges.size());
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n) {
      throw Error(fmt::format("edge ({}, {}) out of range for {} nodes", u, v, n));
    }
    if (u == v) continue;
    canon.emplace_back(std::min(u, v), std::max(u, v));
  }
  std::sort(canon.begin(), canon.end());
  canon.erase(std::unique(canon.begin(), canon.end()), canon.end());

  Graph g;
  g.offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
  for (auto [u, v] : canon) {
    ++g.offsets_[u + 1];
    ++g.offsets_[v + 1];
  }
  for (NodeId u = 0; u < n; ++u) g.offsets_[u + 1] += g.offsets_[u];
  g.targets_.resize(canon.size() * 2);
  std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
  for (auto [u, v] : canon) {
    g.targets_[fill[u]++] = v;
    g.targets_[fill[v]++] = u;
  }
  for (NodeId u = 0; u < n; ++u) {
    std::sort(g.targets_.begin() + g.offsets_[u], g.targets_.begin() + g.offsets_[u + 1]);
  }
  g.index_.reserve(labels.size());
  for (NodeId u = 0; u < n; ++u) {
    if (!g.index_.emplace(labels[u], u).second) {
      throw Error("duplicate node label '" + labels[u] + "'");
    }
  }
  g.labels_ = std::move(labels);
  return g;
}

Graph Graph::from_edges(NodeId node_count, std::span<const Edge> edges) {
  std::vector<std::string> labels(static_cast<std::size_t>(node_count));
  for (NodeId u = 0; u < node_count; ++u) labels[u] = std::to_string(u);
  return from_edges(std::move(labels), edges);
}

std::size_t Graph::degree(NodeId u) const {
  if (!contains(u)) throw std::out_of_range(fmt::format("node id {} out of range", u));
  return offsets_[u + 1] - offsets_[u];
}

std::optional<NodeId> Graph::find(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count());
  for (NodeId u = 0; u < node_count(); ++u) {
    for (NodeId v : neighbors(u)) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

Eigen::SparseMatrix<double> Graph::adjacency_matrix() const {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(targets_.size());
  for (NodeId u = 0; u < node_count(); ++u) {
    for (NodeId v : neighbors(u)) trip.emplace_back(u, v, 1.0);
  }
  Eigen::SparseMatrix<double> a(node_count(), node_count());
  a.setFromTriplets(trip.begin(), trip.end());
  return a;
}

namespace {

std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  auto is_sep = [](char c) { return c == ' ' || c == '\t' || c == ',' || c == '\r'; };
  while (i < line.size()) {
    while (i < line.size() && is_sep(line[i])) ++i;
    std::size_t j = i;
    while (j < line.size() && !is_sep(line[j])) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

Graph parse_edge_list(std::istream& in) {
  std::vector<std::string> labels;
  std::unordered_map<std::string, NodeId> ids;
  std::vector<Edge> edges;
  auto intern = [&](std::string_view tok) {
    auto [it, inserted] = ids.try_emplace(std::string(tok), static_cast<NodeId>(labels.size()));
    if (inserted) labels.emplace_back(tok);
    return it->second;
  };

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto tokens = split_tokens(line);
    if (tokens.empty() || tokens.front().front() == '%' || tokens.front().front() == '#') continue;
    if (tokens.size() != 2) {
      throw ParseError(lineno, fmt::format("expected 2 node labels, found {}", tokens.size()));
    }
    NodeId u = intern(tokens[0]);
    NodeId v = intern(tokens[1]);
    edges.emplace_back(u, v);
  }
  if (labels.empty()) throw Error("edge list contains no edges");
  return Graph::from_edges(std::move(labels), edges);
}

Graph parse_edge_list(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_edge_list(in);
}

Graph read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open edge list '" + path + "'");
  return parse_edge_list(in);
}

void write_edge_list(const Graph& g, std::ostream& out) {
  for (auto [u, v] : g.edges()) out << g.label(u) << ' ' << g.label(v) << '\n';
}

GraphStats graph_stats(const Graph& g) {
  if (g.node_count() < 1) throw Error("graph_stats requires at least one node");
  GraphStats s;
  s.n = static_cast<std::size_t>(g.node_count());
  s.m = g.edge_count();
  double sum_sq = 0.0;
  for (NodeId u = 0; u < g.node_count(); ++u) {
    auto k = g.degree(u);
    s.max_degree = std::max(s.max_degree, k);
    sum_sq += static_cast<double>(k) * static_cast<double>(k);
  }
  s.avg_degree = 2.0 * static_cast<double>(s.m) / static_cast<double>(s.n);
  s.mean_degree_squared = sum_sq / static_cast<double>(s.n);
  if (s.mean_degree_squared > s.avg_degree) {
    s.beta_threshold = s.avg_degree / (s.mean_degree_squared - s.avg_degree);
  }
  return s;
}

std::string stats_to_json(const GraphStats& s) {
  nlohmann::json j{{"n", s.n},
                   {"m", s.m},
                   {"max_deg", s.max_degree},
                   {"avg_deg", s.avg_degree},
                   {"mean_deg_sq", s.mean_degree_squared}};
  j["beta_th"] = s.beta_threshold ? nlohmann::json(*s.beta_threshold) : nlohmann::json(nullptr);
  return j.dump();
}

std::string stats_csv_header() { return "n,m,max_deg,avg_deg,mean_deg_sq,beta_th"; }

std::string stats_csv_row(const GraphStats& s) {
  return fmt::format("{},{},{},{},{},{}", s.n, s.m, s.max_degree, s.avg_degree, s.mean_degree_squared,
                     s.beta_threshold ? fmt::format("{}", *s.beta_threshold) : std::string("undefined"));
}

}  // namespace eml
