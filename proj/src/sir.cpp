#include "eml/sir.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include <fmt/format.h>

namespace eml {

void SirConfig::validate() const {
  if (!(beta >= 0.0 && beta <= 1.0)) throw Error(fmt::format("beta must lie in [0,1], got {}", beta));
  if (!(mu > 0.0 && mu <= 1.0)) throw Error(fmt::format("mu must lie in (0,1], got {}", mu));
  if (runs < 1) throw Error("runs must be >= 1");
}

void SirSimulator::next_epoch() {
  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    epoch_ = 1;
  }
}

std::size_t simulate_sir(const Graph& g, NodeId seed, double beta, double mu, SirRng& rng) {
  SirSimulator sim(g);
  return sim.run(seed, beta, mu, rng);
}

std::vector<VitalityEstimate> estimate_vitality(const Graph& g, std::span<const NodeId> nodes,
                                                const SirConfig& cfg, unsigned workers) {
  cfg.validate();
  for (NodeId u : nodes) {
    if (!g.contains(u)) throw Error(fmt::format("estimate_vitality: invalid node {}", u));
  }
  std::vector<VitalityEstimate> out(nodes.size());
  if (nodes.empty()) return out;

  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, nodes.size()));

  // Each node's runs are summed in integers, so the result does not depend on
  // which worker handled it.
  std::atomic<std::size_t> cursor{0};
  auto work = [&] {
    SirSimulator sim(g);
    SirRng rng;
    for (std::size_t i = cursor++; i < nodes.size(); i = cursor++) {
      const NodeId u = nodes[i];
      std::uint64_t sum = 0;
      std::uint64_t sum_sq = 0;
      for (std::size_t r = 0; r < cfg.runs; ++r) {
        rng.seed(sir_run_seed(cfg.master_seed, u, r));
        const std::uint64_t x = sim.run(u, cfg.beta, cfg.mu, rng);
        sum += x;
        sum_sq += x * x;
      }
      const double runs = static_cast<double>(cfg.runs);
      const double mean = static_cast<double>(sum) / runs;
      double var = 0.0;
      if (cfg.runs > 1) {
        var = (static_cast<double>(sum_sq) - runs * mean * mean) / (runs - 1.0);
        var = std::max(var, 0.0);
      }
      out[i] = VitalityEstimate{u, mean, cfg.runs, std::sqrt(var / runs)};
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return out;
}

Ranking ground_truth_ranking(const Graph& g, const SirConfig& cfg, unsigned workers) {
  std::vector<NodeId> all(static_cast<std::size_t>(g.node_count()));
  for (NodeId u = 0; u < g.node_count(); ++u) all[u] = u;
  auto est = estimate_vitality(g, all, cfg, workers);
  Vector scores(g.node_count());
  for (const auto& e : est) scores[e.node] = e.mean_influence;
  return rank_by_score("ground-truth", std::move(scores));
}

}  // namespace eml
