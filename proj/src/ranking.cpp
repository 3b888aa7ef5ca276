#include "eml/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace eml {

Ranking rank_by_score(std::string method, Vector scores) {
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) throw Error(method + ": non-finite score for node " + std::to_string(i));
  }
  Ranking r{std::move(method), std::vector<NodeId>(static_cast<std::size_t>(scores.size())), std::move(scores)};
  std::iota(r.order.begin(), r.order.end(), NodeId{0});
  std::stable_sort(r.order.begin(), r.order.end(),
                   [&](NodeId a, NodeId b) { return r.scores[a] > r.scores[b]; });
  return r;
}

}  // namespace eml
