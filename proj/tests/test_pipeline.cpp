#include <doctest.h>

#include <numeric>

#include "eml/baselines.hpp"
#include "eml/decomposition.hpp"
#include "eml/generators.hpp"
#include "eml/metrics.hpp"
#include "eml/pipeline.hpp"

using namespace eml;

namespace {

EmlConfig small_config(double beta, double fraction = 0.1) {
  EmlConfig c;
  c.sir = SirConfig{beta, 1.0, 400, 21};
  c.sample.fraction = fraction;
  c.sample.seed = 5;
  return c;
}

}  // namespace

TEST_SUITE("eml") {
  TEST_CASE("eml score fixtures") {
    auto p3 = gen::path(3);
    Vector pred(3), eks(3);
    pred << 1, 2, 1;
    eks << 3, 4, 3;
    auto s = eml_score(p3, pred, eks, 0.5);
    CHECK(s[1] == 5.0);
    CHECK(s[0] == 5.0);
    CHECK(s[2] == 5.0);
    CHECK(eml_score(p3, pred, eks, 0.0) == pred);
    auto iso = Graph::from_edges(2, std::vector<Edge>{});
    Vector p2(2), e2 = Vector::Zero(2);
    p2 << 3.5, -1;
    CHECK(eml_score(iso, p2, e2, 1.0) == p2);
    CHECK_THROWS(eml_score(p3, pred, eks, 1.5));
    CHECK_THROWS(eml_score(p3, pred, eks, -0.1));
    CHECK_THROWS(eml_score(p3, pred.head(2), eks, 0.5));
  }

  TEST_CASE("scaling predictions scales scores and keeps the order") {
    auto g = gen::preferential_attachment(60, 3, 1);
    auto eks = coreness_table(g).eks;
    Vector pred = Vector::LinSpaced(60, 1.0, 7.0);
    auto a = eml_score(g, pred, eks, 0.5);
    auto b = eml_score(g, 3.0 * pred, eks, 0.5);
    CHECK((b - 3.0 * a).cwiseAbs().maxCoeff() <= 1e-12 * b.cwiseAbs().maxCoeff());
    CHECK(rank_by_score("a", a).order == rank_by_score("b", b).order);
  }

  TEST_CASE("run_eml is deterministic and complete") {
    auto g = gen::preferential_attachment(200, 3, 2);
    auto cfg = small_config(0.2);
    auto a = run_eml(g, cfg);
    auto b = run_eml(g, cfg);
    CHECK(a.ranking.order == b.ranking.order);
    CHECK(a.ranking.scores == b.ranking.scores);
    CHECK(a.ranking.method == "eml");
    CHECK(a.training_nodes.size() == 20);
    std::vector<NodeId> sorted = a.ranking.order;
    std::sort(sorted.begin(), sorted.end());
    std::vector<NodeId> all(200);
    std::iota(all.begin(), all.end(), 0);
    CHECK(sorted == all);
    for (std::size_t i = 1; i < a.ranking.order.size(); ++i)
      CHECK(a.ranking.scores[a.ranking.order[i - 1]] >= a.ranking.scores[a.ranking.order[i]]);
    cfg.workers = 3;
    CHECK(run_eml(g, cfg).ranking.scores == a.ranking.scores);
  }

  TEST_CASE("too small a sample is an error") {
    auto g = gen::path(10);
    auto cfg = small_config(0.3, 0.01);
    CHECK_THROWS_WITH_AS(run_eml(g, cfg), doctest::Contains("--sample-frac"), Error);
  }

  TEST_CASE("both sampling methods and the knn regressor run") {
    auto g = gen::preferential_attachment(150, 3, 3);
    for (auto method : {SamplingMethod::uniform, SamplingMethod::cluster}) {
      auto cfg = small_config(0.25);
      cfg.sample.method = method;
      auto r = run_eml(g, cfg);
      CHECK(r.training_nodes.size() == 15);
      CHECK(r.k >= 1);
      cfg.regressor = "knn";
      CHECK(run_eml(g, cfg).ranking.order.size() == 150);
    }
    auto cfg = small_config(0.25);
    cfg.sample.k_override = 2;
    CHECK(run_eml(g, cfg).k == 2);
  }

  TEST_CASE("vertex transitive graphs give flat scores when targets are forced") {
    for (const Graph& g : {gen::cycle(40), gen::complete(12)}) {
      for (double beta : {0.0, 1.0}) {
        auto cfg = small_config(beta, 0.25);
        auto r = run_eml(g, cfg);
        const double spread = r.ranking.scores.maxCoeff() - r.ranking.scores.minCoeff();
        CHECK(spread <= 1e-9 * std::max(1.0, r.ranking.scores.cwiseAbs().maxCoeff()));
        std::vector<NodeId> index(g.node_count());
        std::iota(index.begin(), index.end(), 0);
        CHECK(r.ranking.order == index);
      }
    }
  }

  TEST_CASE("training predictions follow their targets") {
    auto g = gen::preferential_attachment(400, 3, 9);
    const double beta = 1.3 * *graph_stats(g).beta_threshold;
    auto cfg = small_config(beta, 0.05);
    cfg.sir.runs = 1000;
    auto r = run_eml(g, cfg);
    Vector fitted(static_cast<Eigen::Index>(r.training_nodes.size()));
    for (std::size_t i = 0; i < r.training_nodes.size(); ++i) fitted[i] = r.predictions[r.training_nodes[i]];
    auto tau = kendall_tau(fitted, r.training_targets);
    REQUIRE(tau);
    CHECK(*tau > 0.0);
  }

  TEST_CASE("eml beats degree on a scale-free graph") {
    auto g = gen::preferential_attachment(300, 3, 4);
    const double beta = 1.1 * *graph_stats(g).beta_threshold;
    auto truth = ground_truth_ranking(g, SirConfig{beta, 1.0, 3000, 8});
    auto cfg = small_config(beta, 0.05);
    cfg.sir.runs = 3000;
    auto r = run_eml(g, cfg);
    auto eml_tau = kendall_tau(r.ranking.scores, truth.scores);
    auto deg_tau = kendall_tau(degree_centrality(g), truth.scores);
    REQUIRE(eml_tau);
    REQUIRE(deg_tau);
    CHECK(*eml_tau > *deg_tau);
  }

  TEST_CASE("config validation") {
    EmlConfig c;
    CHECK_NOTHROW(c.validate());
    c.alpha = 2;
    CHECK_THROWS(c.validate());
    c.alpha = 0.5;
    c.regressor = "tree";
    CHECK_THROWS(c.validate());
  }
}
