#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "eml/graph.hpp"

namespace eml {

struct CentralityResult {
  std::string method_name;
  Vector scores;
};

Vector degree_centrality(const Graph& g);
Vector ks_centrality(const Graph& g);
Vector h_index_centrality(const Graph& g);

/// LH(u) = H(u) + sum of H over neighbours.
Vector local_h_index(const Graph& g);

/// C_L(u) = sum_{v in N(u)} sum_{w in N(v)} N2(w), where N2(w) counts the
/// distinct nodes within two hops of w.
Vector local_rank(const Graph& g);

/// Sum of neighbours' shell indices.
Vector cnc(const Graph& g);

/// Sum of shell indices over every node at distance 1 or 2.
Vector extended_kshell_sum(const Graph& g);

/// I_u = sum_{v in N(u)} (1 - |N(u) & N(v)| / |N(u) | N(v)|) * ks(v).
Vector link_significance(const Graph& g);

/// Row sums of beta A + beta^2 A^2 + ... + beta^t A^t, by t sparse
/// matrix-vector products.
Vector ds_centrality(const Graph& g, double beta, int t);

struct BaselineParams {
  double beta = 0.1;  // DS only
  int ds_t = 5;
};

/// degree, ks, hindex, lh, localrank, cnc, eks-sum, ls, ds
const std::vector<std::string>& baseline_names();

/// True for every baseline whose scores ignore the dynamics (all but ds).
bool is_static_baseline(std::string_view name);

CentralityResult compute_baseline(std::string_view name, const Graph& g, const BaselineParams& params = {});

}  // namespace eml
