#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "eml/features.hpp"
#include "eml/sampling.hpp"

using namespace eml;

namespace {

// Dense points as a sparse feature matrix.
FeatureMatrix rows_of(const std::vector<std::vector<double>>& pts) {
  FeatureMatrix x(static_cast<Eigen::Index>(pts.size()), static_cast<Eigen::Index>(pts.front().size()));
  std::vector<Eigen::Triplet<double>> t;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts[i].size(); ++j)
      if (pts[i][j] != 0.0) t.emplace_back(static_cast<int>(i), static_cast<int>(j), pts[i][j]);
  x.setFromTriplets(t.begin(), t.end());
  return x;
}

// `sizes[b]` points around each centre. Centres sit on a circle of radius
// 100, so every pair of blobs is equally far apart.
std::vector<std::vector<double>> blobs(const std::vector<int>& sizes, std::mt19937_64& rng, double spread = 0.1) {
  std::normal_distribution<double> noise(0.0, spread);
  std::vector<std::vector<double>> pts;
  const double step = 2.0 * 3.141592653589793 / static_cast<double>(sizes.size());
  for (std::size_t b = 0; b < sizes.size(); ++b) {
    const double cx = 200 + 100 * std::cos(step * b), cy = 200 + 100 * std::sin(step * b);
    for (int i = 0; i < sizes[b]; ++i) pts.push_back({cx + noise(rng), cy + noise(rng)});
  }
  return pts;
}

std::vector<NodeId> iota_nodes(int n) {
  std::vector<NodeId> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

}  // namespace

TEST_SUITE("sampling") {
  TEST_CASE("sample size rounds and never drops below one") {
    SampleSpec s;
    CHECK(s.sample_size(1000) == 5);
    CHECK(s.sample_size(100) == 1);
    s.fraction = 1.0;
    CHECK(s.sample_size(7) == 7);
    s.fraction = 0.0;
    CHECK_THROWS(s.sample_size(10));
    s.fraction = 1.5;
    CHECK_THROWS(s.sample_size(10));
    CHECK(parse_sampling_method("uniform") == SamplingMethod::uniform);
    CHECK(to_string(SamplingMethod::cluster) == "cluster");
    CHECK_THROWS(parse_sampling_method("edges"));
  }

  TEST_CASE("uniform sample edge cases") {
    SampleRng rng(1);
    auto all = iota_nodes(9);
    CHECK(uniform_sample(all, 9, rng) == all);
    const NodeId a = 4;
    CHECK(uniform_sample(std::span(&a, 1), 1, rng) == std::vector<NodeId>{4});
    CHECK_THROWS(uniform_sample(all, 10, rng));
    auto s = uniform_sample(all, 5, rng);
    CHECK(std::set<NodeId>(s.begin(), s.end()).size() == 5);
  }

  TEST_CASE("single draws are uniform by chi-square") {
    SampleRng rng(2024);
    auto nodes = iota_nodes(10);
    std::vector<int> counts(10, 0);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) ++counts[uniform_sample(nodes, 1, rng)[0]];
    double chi2 = 0;
    for (int c : counts) chi2 += (c - draws / 10.0) * (c - draws / 10.0) / (draws / 10.0);
    // 0.999 quantile of chi-square with 9 degrees of freedom.
    CHECK(chi2 < 27.877);
  }

  TEST_CASE("pairs are uniform by chi-square") {
    SampleRng rng(77);
    auto nodes = iota_nodes(5);
    std::map<std::pair<NodeId, NodeId>, int> counts;
    const int draws = 50000;
    for (int i = 0; i < draws; ++i) {
      auto s = uniform_sample(nodes, 2, rng);
      ++counts[{s[0], s[1]}];
    }
    CHECK(counts.size() == 10);
    double chi2 = 0;
    for (const auto& [_, c] : counts) chi2 += (c - draws / 10.0) * (c - draws / 10.0) / (draws / 10.0);
    CHECK(chi2 < 27.877);
  }

  TEST_CASE("k-means fixtures") {
    SampleRng rng(3);
    auto pts = blobs({20, 20}, rng);
    auto x = rows_of(pts);
    auto one = kmeans(x, 1, rng);
    CHECK(one.k == 1);
    Eigen::MatrixXd dense(x);
    CHECK((one.centroids.row(0) - dense.colwise().mean()).norm() < 1e-9);
    CHECK(std::all_of(one.assignment.begin(), one.assignment.end(), [](int a) { return a == 0; }));

    auto two = kmeans(x, 2, rng);
    for (int i = 0; i < 20; ++i) {
      CHECK(two.assignment[i] == two.assignment[0]);
      CHECK(two.assignment[20 + i] == two.assignment[20]);
    }
    CHECK(two.assignment[0] != two.assignment[20]);

    auto each = kmeans(x, 40, rng);
    CHECK(each.inertia == doctest::Approx(0.0));
    CHECK(std::set<int>(each.assignment.begin(), each.assignment.end()).size() == 40);
    CHECK_THROWS(kmeans(x, 0, rng));
  }

  TEST_CASE("k-means inertia never increases and seeds reproduce") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(0, 10);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<std::vector<double>> pts(60, std::vector<double>(3));
      for (auto& p : pts)
        for (auto& v : p) v = u(gen);
      auto x = rows_of(pts);
      SampleRng a(trial), b(trial);
      auto ca = kmeans(x, 4, a);
      auto cb = kmeans(x, 4, b);
      CHECK(ca.assignment == cb.assignment);
      for (std::size_t i = 1; i < ca.inertia_trace.size(); ++i) CHECK(ca.inertia_trace[i] <= ca.inertia_trace[i - 1] + 1e-9);
      CHECK(ca.inertia == doctest::Approx(ca.inertia_trace.back()));
    }
  }

  TEST_CASE("k-means re-seeds empty clusters on duplicate points") {
    SampleRng rng(1);
    auto x = rows_of({{1, 1}, {1, 1}, {1, 1}, {5, 5}});
    auto c = kmeans(x, 3, rng);
    CHECK(c.k == 3);
    CHECK(c.assignment.size() == 4);
  }

  TEST_CASE("choose_k") {
    SampleRng rng(8);
    auto same = rows_of(std::vector<std::vector<double>>(12, {3.0, 1.0}));
    CHECK(choose_k(same, 4, rng).k == 1);

    // Enough points per blob that the reference spread s_k stays below the
    // gap increase from k = 1 to k = 2.
    auto three = rows_of(blobs({100, 100, 100}, rng));
    auto sel = choose_k(three, 7, rng);
    CHECK(sel.k_elbow == 3);
    CHECK(sel.k_gap == 3);
    CHECK(sel.k == 3);
    CHECK_THROWS(choose_k(rows_of({{1.0}}), 3, rng));
  }

  TEST_CASE("elbow and gap disagreements go to the arbiter") {
    // Arbiter favours 4: that wins. Equal scores or no score: the smaller k.
    CHECK(resolve_k(2, 4, [](int k) { return std::optional<double>(k == 4 ? 0.9 : 0.5); }) == 4);
    CHECK(resolve_k(2, 4, [](int k) { return std::optional<double>(k == 2 ? 0.9 : 0.5); }) == 2);
    CHECK(resolve_k(4, 2, [](int) { return std::optional<double>(0.7); }) == 2);
    CHECK(resolve_k(2, 4, [](int) { return std::optional<double>(); }) == 2);
    CHECK(resolve_k(2, 4, {}) == 2);
    CHECK(resolve_k(3, 3, [](int) -> std::optional<double> { throw std::logic_error("not needed"); }) == 3);
    CHECK(default_k_max(5) == 3);
    CHECK(default_k_max(10000) == 10);
    CHECK(default_k_max(1) == 1);
  }

  TEST_CASE("cluster sample quotas") {
    SampleRng rng(4);
    Clustering c;
    c.k = 3;
    c.assignment = {0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2};
    for (int trial = 0; trial < 20; ++trial) {
      auto s = cluster_sample(c, 6, rng);
      std::vector<int> per(3, 0);
      for (NodeId u : s) ++per[c.assignment[u]];
      CHECK(per == std::vector<int>{2, 2, 2});
    }
  }

  TEST_CASE("small clusters give everything and the deficit is redrawn") {
    SampleRng rng(6);
    Clustering c;
    c.k = 3;
    c.assignment.push_back(0);
    for (int i = 0; i < 10; ++i) c.assignment.push_back(1);
    for (int i = 0; i < 10; ++i) c.assignment.push_back(2);
    std::vector<int> totals(3, 0);
    for (int trial = 0; trial < 200; ++trial) {
      auto s = cluster_sample(c, 6, rng);
      CHECK(s.size() == 6);
      CHECK(std::set<NodeId>(s.begin(), s.end()).size() == 6);
      std::vector<int> per(3, 0);
      for (NodeId u : s) ++per[c.assignment[u]];
      CHECK(per[0] == 1);
      CHECK(per[1] >= 2);
      CHECK(per[2] >= 2);
      totals[1] += per[1];
      totals[2] += per[2];
    }
    // The extra slot goes to either big cluster.
    CHECK(totals[1] + totals[2] == 1000);
    CHECK(totals[1] > 400);
    CHECK(totals[2] > 400);
  }

  TEST_CASE("cluster sample covers every cluster and is seed deterministic") {
    std::mt19937_64 gen(12);
    auto x = rows_of(blobs({7, 30, 12, 3}, gen));
    for (std::size_t s : {4u, 5u, 9u, 20u, 52u}) {
      SampleRng a(s), b(s);
      auto sa = cluster_sample(x, s, a, 4);
      auto sb = cluster_sample(x, s, b, 4);
      CHECK(sa == sb);
      CHECK(sa.size() == s);
      CHECK(std::set<NodeId>(sa.begin(), sa.end()).size() == s);
      std::set<int> blob_ids;
      for (NodeId u : sa) blob_ids.insert(u < 7 ? 0 : u < 37 ? 1 : u < 49 ? 2 : 3);
      CHECK(blob_ids.size() == 4);
    }
    SampleRng r(1);
    CHECK_THROWS(cluster_sample(x, 53, r, 4));
  }
}
