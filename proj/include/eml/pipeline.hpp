#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eml/features.hpp"
#include "eml/ranking.hpp"
#include "eml/regression.hpp"
#include "eml/sampling.hpp"
#include "eml/sir.hpp"

namespace eml {

struct EmlConfig {
  double alpha = 0.5;  // neighbour weight, in [0, 1]
  FeatureWeights features;
  SampleSpec sample;
  SirConfig sir;
  SvrParams svr;
  std::string regressor = "svr";
  unsigned workers = 0;
  /// Row cap for the elbow/gap scan; larger graphs are subsampled first.
  std::size_t choose_k_rows = 256;
  int cv_folds = 5;

  void validate() const;
};

/// EML(u) = pred(u) + alpha * sum_{v in N(u)} eks(v) * pred(v).
Vector eml_score(const Graph& g, const Vector& predictions, const Vector& eks, double alpha);

struct EmlResult {
  Ranking ranking;
  Vector predictions;  // raw regressor output per node
  std::vector<NodeId> training_nodes;
  Vector training_targets;
  int k = 1;  // cluster count used (1 for uniform sampling)
  std::optional<KSelection> k_selection;
  double sigma = 0.0;
  double epsilon = 0.0;
  double kkt_gap = 0.0;
  std::optional<SvrModel> model;  // set when the regressor is "svr"
};

/// Features -> (cluster) sampling -> SIR targets on the sample -> regressor ->
/// EML scores -> ranking. Deterministic in cfg.sample.seed and
/// cfg.sir.master_seed.
EmlResult run_eml(const Graph& g, const EmlConfig& cfg);

/// Leave-fold-out Kendall tau of regressor predictions against targets.
/// Empty when fewer than two samples or tau is undefined.
std::optional<double> cross_validated_tau(const std::vector<SparseFeatureVector>& x, const Vector& y,
                                          const std::string& regressor, const SvrParams& params, int folds,
                                          std::uint64_t seed);

}  // namespace eml
