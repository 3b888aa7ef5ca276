#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/SparseCore>

#include "eml/common.hpp"

namespace eml {

using Edge = std::pair<NodeId, NodeId>;

/// Undirected simple graph in CSR form. Immutable once built.
///
/// Adjacency lists are sorted ascending, contain no self-loops and no
/// duplicates. Every node carries an external label; internal ids are dense.
class Graph {
 public:
  Graph() = default;

  /// Builds a simple graph over `labels.size()` nodes. Self-loops are dropped
  /// and duplicate edges (either orientation) merged.
  static Graph from_edges(std::vector<std::string> labels, std::span<const Edge> edges);

  /// Same, with labels "0".."n-1".
  static Graph from_edges(NodeId node_count, std::span<const Edge> edges);

  NodeId node_count() const { return static_cast<NodeId>(labels_.size()); }
  std::size_t edge_count() const { return targets_.size() / 2; }

  bool contains(NodeId u) const { return u >= 0 && u < node_count(); }

  /// Unchecked neighbour access.
  std::span<const NodeId> neighbors(NodeId u) const {
    return {targets_.data() + offsets_[u], targets_.data() + offsets_[u + 1]};
  }

  /// Throws std::out_of_range for an invalid id.
  std::size_t degree(NodeId u) const;

  const std::string& label(NodeId u) const { return labels_.at(u); }
  const std::vector<std::string>& labels() const { return labels_; }
  std::optional<NodeId> find(std::string_view label) const;

  bool has_edge(NodeId u, NodeId v) const;

  /// Each undirected edge once, as (u, v) with u < v, in ascending order.
  std::vector<Edge> edges() const;

  Eigen::SparseMatrix<double> adjacency_matrix() const;

 private:
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> targets_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, NodeId> index_;
};

struct GraphStats {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t max_degree = 0;
  double avg_degree = 0.0;
  double mean_degree_squared = 0.0;
  /// <k>/(<k^2> - <k>); empty when <k^2> <= <k>.
  std::optional<double> beta_threshold;
};

/// Reads a whitespace- or comma-separated edge list. Lines starting with '%'
/// or '#' are comments. Labels are assigned dense ids in first-seen order.
Graph parse_edge_list(std::istream& in);
Graph parse_edge_list(std::string_view text);
Graph read_edge_list_file(const std::string& path);

void write_edge_list(const Graph& g, std::ostream& out);

GraphStats graph_stats(const Graph& g);

std::string stats_to_json(const GraphStats& s);
std::string stats_csv_header();
std::string stats_csv_row(const GraphStats& s);

}  // namespace eml
