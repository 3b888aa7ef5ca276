#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "eml/features.hpp"

namespace eml {

enum class SamplingMethod { uniform, cluster };

std::string to_string(SamplingMethod m);
SamplingMethod parse_sampling_method(std::string_view s);

struct SampleSpec {
  double fraction = 0.005;
  SamplingMethod method = SamplingMethod::cluster;
  std::uint64_t seed = 0;
  std::optional<int> k_override;

  /// max(1, round(fraction * n)); throws if fraction is outside (0, 1].
  std::size_t sample_size(std::size_t n) const;
};

using SampleRng = std::mt19937_64;

/// `s` distinct nodes, every size-s subset equally likely. Returned sorted.
std::vector<NodeId> uniform_sample(std::span<const NodeId> nodes, std::size_t s, SampleRng& rng);

struct Clustering {
  int k = 0;
  std::vector<int> assignment;  // per row
  Eigen::MatrixXd centroids;    // k x dim
  double inertia = 0.0;         // within-cluster sum of squared distances
  std::vector<double> inertia_trace;  // after each assignment step
  std::size_t iterations = 0;
};

/// Lloyd iterations from a k-means++ seeding, until the assignment stops
/// changing or `max_iters` is hit. An emptied cluster is re-seeded at the
/// point farthest from its current centroid.
Clustering kmeans(const FeatureMatrix& x, int k, SampleRng& rng, std::size_t max_iters = 100);

/// Scores a candidate cluster count; larger is better, nullopt if undefined.
using KArbiter = std::function<std::optional<double>(int k)>;

struct KSelection {
  int k = 1;
  int k_elbow = 1;
  int k_gap = 1;
  std::vector<double> inertia;  // index k-1, for k = 1..k_max+1 (capped at rows)
  std::vector<double> gap;      // index k-1
  std::vector<double> gap_sd;   // s_k, already scaled by sqrt(1 + 1/B)
};

inline constexpr int kGapReferenceSets = 10;

/// min(10, ceil(sqrt(sample size))).
int default_k_max(std::size_t sample_size);

/// Picks between two candidate counts using `arbiter`; ties and undefined
/// scores fall back to the smaller count. Without an arbiter the smaller one
/// wins.
int resolve_k(int k_elbow, int k_gap, const KArbiter& arbiter);

/// Elbow (largest second difference of inertia) and gap statistic over
/// k = 1..k_max, resolved with `resolve_k`. All-identical rows give 1.
KSelection choose_k(const FeatureMatrix& x, int k_max, SampleRng& rng, const KArbiter& arbiter = {});

/// floor(s/k) per cluster, the s mod k remainder one each to the largest
/// clusters; short clusters give all they have and the deficit is drawn
/// uniformly from the unsampled rest. Returned sorted.
std::vector<NodeId> cluster_sample(const Clustering& clusters, std::size_t s, SampleRng& rng);

/// Chooses k (or uses `k_override`), clusters the rows of `x` and samples.
std::vector<NodeId> cluster_sample(const FeatureMatrix& x, std::size_t s, SampleRng& rng,
                                   std::optional<int> k_override = std::nullopt);

}  // namespace eml
