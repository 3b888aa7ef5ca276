#pragma once

#include <string>
#include <vector>

#include "eml/common.hpp"

namespace eml {

/// Nodes ordered by descending score, ties broken by ascending node id.
struct Ranking {
  std::string method;
  std::vector<NodeId> order;
  Vector scores;  // indexed by node id, not by rank

  std::size_t size() const { return order.size(); }
};

/// Throws eml::Error on non-finite scores.
Ranking rank_by_score(std::string method, Vector scores);

}  // namespace eml
