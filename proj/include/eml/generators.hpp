#pragma once

#include <cstdint>

#include "eml/graph.hpp"

namespace eml::gen {

Graph path(NodeId n);
Graph cycle(NodeId n);
/// Center is node 0.
Graph star(NodeId leaves);
Graph complete(NodeId n);
/// Uniform random graph with exactly `m` distinct edges.
Graph random_gnm(NodeId n, std::size_t m, std::uint64_t seed);

/// Preferential-attachment growth with a fractional number of links per new
/// node, so sparse targets like avg degree 2.5 are reachable. Starts from a
/// small clique; each arriving node links to floor(avg/2) or ceil(avg/2)
/// distinct existing nodes chosen proportionally to degree. Connected.
Graph preferential_attachment(NodeId n, double avg_degree, std::uint64_t seed);

}  // namespace eml::gen
