#pragma once

#include <iosfwd>
#include <vector>

#include "eml/graph.hpp"

namespace eml {

/// Shell index per node via bucket-queue peeling, O(n + m).
/// Isolated nodes land in shell 0.
std::vector<int> k_shell(const Graph& g);

/// Largest h such that at least h neighbours of `u` have degree >= h.
int h_index(const Graph& g, NodeId u);
std::vector<int> h_index_all(const Graph& g);

/// eks(v) = ks(v)|N(v)| + sum over neighbours u of ks(u)|N(u)|.
Vector extended_coreness(const Graph& g, const std::vector<int>& ks);

struct CorenessTable {
  std::vector<int> ks;
  Vector eks;
};

CorenessTable coreness_table(const Graph& g);

/// node_label,degree,ks,h_index,eks
void write_coreness_csv(const Graph& g, std::ostream& out);

}  // namespace eml
