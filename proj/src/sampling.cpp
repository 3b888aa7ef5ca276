#include "eml/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

namespace eml {

std::string to_string(SamplingMethod m) { return m == SamplingMethod::uniform ? "uniform" : "cluster"; }

SamplingMethod parse_sampling_method(std::string_view s) {
  if (s == "uniform") return SamplingMethod::uniform;
  if (s == "cluster") return SamplingMethod::cluster;
  throw Error("unknown sampling method '" + std::string(s) + "'");
}

std::size_t SampleSpec::sample_size(std::size_t n) const {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw Error(fmt::format("sample fraction must lie in (0,1], got {}", fraction));
  const auto s = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  return std::max<std::size_t>(1, s);
}

std::vector<NodeId> uniform_sample(std::span<const NodeId> nodes, std::size_t s, SampleRng& rng) {
  if (s > nodes.size()) throw Error(fmt::format("cannot sample {} of {} nodes without replacement", s, nodes.size()));
  std::vector<NodeId> out;
  out.reserve(s);
  std::sample(nodes.begin(), nodes.end(), std::back_inserter(out), static_cast<std::ptrdiff_t>(s), rng);
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

// Squared distance of every row to every centroid, clamped at zero.
Eigen::MatrixXd squared_distances(const FeatureMatrix& x, const Vector& row_sq, const Eigen::MatrixXd& centroids) {
  Eigen::MatrixXd d = -2.0 * (x * centroids.transpose());
  d.colwise() += row_sq;
  d.rowwise() += centroids.rowwise().squaredNorm().transpose();
  return d.cwiseMax(0.0);
}

void add_row(const FeatureMatrix& x, Eigen::Index r, Eigen::MatrixXd& centroids, Eigen::Index c, double w = 1.0) {
  for (FeatureMatrix::InnerIterator it(x, r); it; ++it) centroids(c, it.col()) += w * it.value();
}

Eigen::MatrixXd kmeans_pp_seed(const FeatureMatrix& x, const Vector& row_sq, int k, SampleRng& rng) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(k, x.cols());
  std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
  add_row(x, first(rng), c, 0);
  Vector best = squared_distances(x, row_sq, c.topRows(1)).col(0);
  for (int j = 1; j < k; ++j) {
    Eigen::Index pick;
    const double total = best.sum();
    if (total > 0.0) {
      std::discrete_distribution<Eigen::Index> d(best.data(), best.data() + best.size());
      pick = d(rng);
    } else {
      pick = first(rng);
    }
    add_row(x, pick, c, j);
    Vector dj = squared_distances(x, row_sq, c.row(j)).col(0);
    best = best.cwiseMin(dj);
  }
  return c;
}

}  // namespace

Clustering kmeans(const FeatureMatrix& x, int k, SampleRng& rng, std::size_t max_iters) {
  const Eigen::Index n = x.rows();
  if (k < 1) throw Error("kmeans: k must be >= 1");
  if (n < 1) throw Error("kmeans: no points");
  if (k > n) throw Error(fmt::format("kmeans: k = {} exceeds {} points", k, n));

  Vector row_sq(n);
  for (Eigen::Index r = 0; r < n; ++r) row_sq[r] = x.row(r).squaredNorm();

  Clustering out;
  out.k = k;
  out.centroids = kmeans_pp_seed(x, row_sq, k, rng);
  out.assignment.assign(static_cast<std::size_t>(n), -1);

  for (std::size_t iter = 0;; ++iter) {
    Eigen::MatrixXd d = squared_distances(x, row_sq, out.centroids);
    bool changed = false;
    Vector own(n);
    for (Eigen::Index r = 0; r < n; ++r) {
      Eigen::Index best;
      own[r] = d.row(r).minCoeff(&best);
      if (out.assignment[r] != static_cast<int>(best)) {
        out.assignment[r] = static_cast<int>(best);
        changed = true;
      }
    }
    out.inertia = own.sum();
    out.inertia_trace.push_back(out.inertia);
    out.iterations = iter + 1;
    if (!changed || iter + 1 >= max_iters) break;

    // Update step, repairing empty clusters by stealing the worst-fit point.
    std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index r = 0; r < n; ++r) ++counts[out.assignment[r]];
    for (int j = 0; j < k; ++j) {
      if (counts[j] > 0) continue;
      Eigen::Index far = 0;
      double far_d = -1.0;
      for (Eigen::Index r = 0; r < n; ++r) {
        if (counts[out.assignment[r]] > 1 && own[r] > far_d) {
          far_d = own[r];
          far = r;
        }
      }
      --counts[out.assignment[far]];
      out.assignment[far] = j;
      own[far] = 0.0;
      counts[j] = 1;
    }
    out.centroids.setZero();
    for (Eigen::Index r = 0; r < n; ++r) add_row(x, r, out.centroids, out.assignment[r]);
    for (int j = 0; j < k; ++j) out.centroids.row(j) /= static_cast<double>(counts[j]);
  }
  return out;
}

int default_k_max(std::size_t sample_size) {
  const auto root = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(sample_size))));
  return std::clamp(root, 1, 10);
}

int resolve_k(int k_elbow, int k_gap, const KArbiter& arbiter) {
  const int lo = std::min(k_elbow, k_gap);
  const int hi = std::max(k_elbow, k_gap);
  if (lo == hi || !arbiter) return lo;
  const auto s_lo = arbiter(lo);
  const auto s_hi = arbiter(hi);
  if (s_hi && (!s_lo || *s_hi > *s_lo)) return hi;
  return lo;
}

namespace {

// Rows restricted to columns that actually vary; constant columns add
// nothing to any distance and would give a degenerate reference box.
Eigen::MatrixXd varying_columns(const FeatureMatrix& x) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd dense_cols;
  std::vector<Eigen::Index> keep;
  Vector lo = Vector::Zero(x.cols()), hi = Vector::Zero(x.cols());
  std::vector<Eigen::Index> nnz(static_cast<std::size_t>(x.cols()), 0);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (FeatureMatrix::InnerIterator it(x, r); it; ++it) {
      auto c = it.col();
      if (nnz[c] == 0) {
        lo[c] = hi[c] = it.value();
      } else {
        lo[c] = std::min(lo[c], it.value());
        hi[c] = std::max(hi[c], it.value());
      }
      ++nnz[c];
    }
  }
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    if (nnz[c] == 0) continue;
    if (nnz[c] < n) {
      lo[c] = std::min(lo[c], 0.0);
      hi[c] = std::max(hi[c], 0.0);
    }
    if (hi[c] > lo[c]) keep.push_back(c);
  }
  std::vector<Eigen::Index> slot(static_cast<std::size_t>(x.cols()), -1);
  for (std::size_t i = 0; i < keep.size(); ++i) slot[keep[i]] = static_cast<Eigen::Index>(i);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(keep.size()));
  for (Eigen::Index r = 0; r < n; ++r) {
    for (FeatureMatrix::InnerIterator it(x, r); it; ++it) {
      if (slot[it.col()] >= 0) out(r, slot[it.col()]) = it.value();
    }
  }
  return out;
}

double safe_log(double w) { return std::log(std::max(w, std::numeric_limits<double>::min())); }

}  // namespace

KSelection choose_k(const FeatureMatrix& x, int k_max, SampleRng& rng, const KArbiter& arbiter) {
  const Eigen::Index n = x.rows();
  if (n < 2) throw Error("choose_k: need at least two vectors");
  if (k_max < 1) throw Error("choose_k: k_max must be >= 1");

  KSelection sel;
  const Eigen::MatrixXd data = varying_columns(x);
  if (data.cols() == 0) return sel;  // every vector identical

  const int k_top = static_cast<int>(std::min<Eigen::Index>(k_max + 1, n));
  const FeatureMatrix sparse_data = data.sparseView();
  for (int k = 1; k <= k_top; ++k) sel.inertia.push_back(kmeans(sparse_data, k, rng).inertia);

  // Elbow: largest second difference I(k-1) - 2 I(k) + I(k+1).
  sel.k_elbow = 1;
  double best = -std::numeric_limits<double>::infinity();
  for (int k = 2; k + 1 <= k_top && k <= k_max; ++k) {
    const double d2 = sel.inertia[k - 2] - 2.0 * sel.inertia[k - 1] + sel.inertia[k];
    if (d2 > best) {
      best = d2;
      sel.k_elbow = k;
    }
  }
  if (k_top == 2 && k_max >= 2 && sel.inertia[1] < sel.inertia[0]) sel.k_elbow = 2;

  // Gap statistic against uniform samples from the bounding box.
  const Vector lo = data.colwise().minCoeff();
  const Vector hi = data.colwise().maxCoeff();
  std::vector<std::vector<double>> ref_log(static_cast<std::size_t>(k_top));
  for (int b = 0; b < kGapReferenceSets; ++b) {
    Eigen::MatrixXd ref(n, data.cols());
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (Eigen::Index c = 0; c < ref.cols(); ++c)
      for (Eigen::Index r = 0; r < n; ++r) ref(r, c) = lo[c] + (hi[c] - lo[c]) * u01(rng);
    const FeatureMatrix ref_sparse = ref.sparseView();
    for (int k = 1; k <= k_top; ++k) ref_log[k - 1].push_back(safe_log(kmeans(ref_sparse, k, rng).inertia));
  }
  const double scale = std::sqrt(1.0 + 1.0 / kGapReferenceSets);
  for (int k = 1; k <= k_top; ++k) {
    const auto& v = ref_log[k - 1];
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double var = 0.0;
    for (double e : v) var += (e - mean) * (e - mean);
    var /= static_cast<double>(v.size());
    sel.gap.push_back(mean - safe_log(sel.inertia[k - 1]));
    sel.gap_sd.push_back(std::sqrt(var) * scale);
  }
  const int k_cap = std::min(k_max, k_top);
  sel.k_gap = k_cap;
  for (int k = 1; k < k_top && k <= k_max; ++k) {
    if (sel.gap[k - 1] >= sel.gap[k] - sel.gap_sd[k]) {
      sel.k_gap = k;
      break;
    }
  }

  sel.k = resolve_k(sel.k_elbow, sel.k_gap, arbiter);
  return sel;
}

std::vector<NodeId> cluster_sample(const Clustering& clusters, std::size_t s, SampleRng& rng) {
  const auto n = clusters.assignment.size();
  if (s < 1) throw Error("cluster_sample: sample size must be >= 1");
  if (s > n) throw Error(fmt::format("cannot sample {} of {} nodes without replacement", s, n));
  const int k = clusters.k;

  std::vector<std::vector<NodeId>> members(static_cast<std::size_t>(k));
  for (std::size_t u = 0; u < n; ++u) members[clusters.assignment[u]].push_back(static_cast<NodeId>(u));

  std::vector<std::size_t> quota(static_cast<std::size_t>(k), s / static_cast<std::size_t>(k));
  std::vector<int> by_size(static_cast<std::size_t>(k));
  std::iota(by_size.begin(), by_size.end(), 0);
  std::stable_sort(by_size.begin(), by_size.end(),
                   [&](int a, int b) { return members[a].size() > members[b].size(); });
  for (std::size_t i = 0; i < s % static_cast<std::size_t>(k); ++i) ++quota[by_size[i]];

  std::vector<char> taken(n, 0);
  std::vector<NodeId> out;
  for (int j = 0; j < k; ++j) {
    const auto take = std::min(quota[j], members[j].size());
    for (NodeId u : uniform_sample(members[j], take, rng)) {
      taken[u] = 1;
      out.push_back(u);
    }
  }
  if (out.size() < s) {
    std::vector<NodeId> rest;
    for (std::size_t u = 0; u < n; ++u)
      if (!taken[u]) rest.push_back(static_cast<NodeId>(u));
    auto extra = uniform_sample(rest, s - out.size(), rng);
    out.insert(out.end(), extra.begin(), extra.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<NodeId> cluster_sample(const FeatureMatrix& x, std::size_t s, SampleRng& rng, std::optional<int> k_override) {
  int k = 1;
  if (k_override) {
    k = *k_override;
  } else if (x.rows() >= 2) {
    k = choose_k(x, default_k_max(s), rng).k;
  }
  return cluster_sample(kmeans(x, k, rng), s, rng);
}

}  // namespace eml
