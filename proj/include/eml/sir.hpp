#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "eml/graph.hpp"
#include "eml/ranking.hpp"

namespace eml {

struct SirConfig {
  double beta = 0.0;
  double mu = 1.0;
  std::size_t runs = 3000;
  std::uint64_t master_seed = 0;

  /// Throws eml::Error unless 0 <= beta <= 1, 0 < mu <= 1, runs >= 1.
  void validate() const;
};

struct VitalityEstimate {
  NodeId node = 0;
  double mean_influence = 0.0;
  std::size_t runs = 0;
  double std_error = 0.0;
};

using SirRng = std::mt19937_64;

/// Compartment sizes after a synchronous round (round 0 is the initial state).
struct SirRound {
  std::size_t round = 0;
  std::size_t susceptible = 0;
  std::size_t infected = 0;
  std::size_t removed = 0;
};

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(SirRng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Reusable single-seed SIR simulator. Holds per-node scratch state so
/// repeated runs cost O(touched nodes), not O(n). Not thread-safe; use one
/// per worker.
class SirSimulator {
 public:
  explicit SirSimulator(const Graph& g) : g_(&g), stamp_(static_cast<std::size_t>(g.node_count()), 0) {}

  /// Runs to extinction and returns the number of Removed nodes (seed
  /// included). In each round every Infected node tries each Susceptible
  /// neighbour with probability beta; afterwards each node that was Infected
  /// at the start of the round recovers with probability mu. Nodes infected
  /// during round t start transmitting in round t+1.
  template <typename Observer>
  std::size_t run(NodeId seed, double beta, double mu, SirRng& rng, Observer&& on_round);

  std::size_t run(NodeId seed, double beta, double mu, SirRng& rng) {
    return run(seed, beta, mu, rng, [](const SirRound&) {});
  }

 private:
  void next_epoch();

  const Graph* g_;
  std::vector<std::uint32_t> stamp_;  // == epoch_ once a node left Susceptible
  std::uint32_t epoch_ = 0;
  std::vector<NodeId> infected_;
  std::vector<NodeId> fresh_;
};

std::size_t simulate_sir(const Graph& g, NodeId seed, double beta, double mu, SirRng& rng);

/// Per-run stream seed; independent of scheduling.
inline std::uint64_t sir_run_seed(std::uint64_t master, NodeId node, std::size_t run) {
  return derive_seed(master, static_cast<std::uint64_t>(node), static_cast<std::uint64_t>(run));
}

/// Mean influence over cfg.runs simulations per node. Results are identical
/// for any `workers` value (0 = hardware concurrency).
std::vector<VitalityEstimate> estimate_vitality(const Graph& g, std::span<const NodeId> nodes,
                                                const SirConfig& cfg, unsigned workers = 0);

Ranking ground_truth_ranking(const Graph& g, const SirConfig& cfg, unsigned workers = 0);

// ---------------------------------------------------------------------------

template <typename Observer>
std::size_t SirSimulator::run(NodeId seed, double beta, double mu, SirRng& rng, Observer&& on_round) {
  if (!g_->contains(seed)) throw Error("simulate_sir: invalid seed node");
  next_epoch();
  const auto n = static_cast<std::size_t>(g_->node_count());
  infected_.assign(1, seed);
  stamp_[seed] = epoch_;
  std::size_t susceptible = n - 1;
  std::size_t removed = 0;
  std::size_t round = 0;
  on_round(SirRound{round, susceptible, 1, 0});

  while (!infected_.empty()) {
    fresh_.clear();
    for (NodeId u : infected_) {
      for (NodeId v : g_->neighbors(u)) {
        if (stamp_[v] != epoch_ && uniform01(rng) < beta) {
          stamp_[v] = epoch_;
          fresh_.push_back(v);
        }
      }
    }
    std::size_t kept = 0;
    for (NodeId u : infected_) {
      if (mu >= 1.0 || uniform01(rng) < mu) {
        ++removed;
      } else {
        infected_[kept++] = u;
      }
    }
    infected_.resize(kept);
    infected_.insert(infected_.end(), fresh_.begin(), fresh_.end());
    susceptible -= fresh_.size();
    on_round(SirRound{++round, susceptible, infected_.size(), removed});
  }
  return removed;
}

}  // namespace eml
