#include "eml/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <fmt/format.h>

#include "eml/decomposition.hpp"
#include "eml/metrics.hpp"

namespace eml {

namespace {

enum SeedTag : std::uint64_t { kSampleTag = 1, kChooseTag = 2, kClusterTag = 3, kCvTag = 4 };

}  // namespace

void EmlConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(fmt::format("alpha must lie in [0,1], got {}", alpha));
  features.validate();
  sir.validate();
  if (cv_folds < 2) throw Error("cv_folds must be >= 2");
  if (regressor != "svr" && regressor != "knn") throw Error("unknown regressor '" + regressor + "'");
}

Vector eml_score(const Graph& g, const Vector& predictions, const Vector& eks, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(fmt::format("alpha must lie in [0,1], got {}", alpha));
  if (predictions.size() != g.node_count() || eks.size() != g.node_count()) {
    throw Error("eml_score: predictions and eks must cover every node");
  }
  const Vector weighted = eks.cwiseProduct(predictions);
  Vector out = predictions;
  for (NodeId u = 0; u < g.node_count(); ++u) {
    double s = 0.0;
    for (NodeId v : g.neighbors(u)) s += weighted[v];
    out[u] += alpha * s;
  }
  return out;
}

std::optional<double> cross_validated_tau(const std::vector<SparseFeatureVector>& x, const Vector& y,
                                          const std::string& regressor, const SvrParams& params, int folds,
                                          std::uint64_t seed) {
  const auto s = x.size();
  if (s < 2) return std::nullopt;
  const auto f = std::min<std::size_t>(static_cast<std::size_t>(folds), s);
  std::vector<std::size_t> perm(s);
  std::iota(perm.begin(), perm.end(), 0);
  SampleRng rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);

  Vector held_out(static_cast<Eigen::Index>(s));
  for (std::size_t fold = 0; fold < f; ++fold) {
    std::vector<SparseFeatureVector> tx;
    std::vector<double> ty;
    std::vector<std::size_t> test;
    for (std::size_t i = 0; i < s; ++i) {
      if (i % f == fold) {
        test.push_back(perm[i]);
      } else {
        tx.push_back(x[perm[i]]);
        ty.push_back(y[static_cast<Eigen::Index>(perm[i])]);
      }
    }
    auto model = make_regressor(regressor, params);
    model->fit(tx, Eigen::Map<const Vector>(ty.data(), static_cast<Eigen::Index>(ty.size())));
    for (std::size_t i : test) held_out[static_cast<Eigen::Index>(i)] = model->predict(x[i]);
  }
  return kendall_tau(held_out, y);
}

EmlResult run_eml(const Graph& g, const EmlConfig& cfg) {
  cfg.validate();
  const NodeId n = g.node_count();
  if (n < 1) throw Error("run_eml: empty graph");
  const auto rounded = std::llround(cfg.sample.fraction * static_cast<double>(n));
  if (rounded < 1) {
    throw Error(fmt::format("sample fraction {} selects no node out of {}; use a larger --sample-frac",
                            cfg.sample.fraction, n));
  }
  const std::size_t s = cfg.sample.sample_size(static_cast<std::size_t>(n));

  const Vector degrees = degree_vector(g);
  const Vector eks = extended_coreness(g, k_shell(g));
  const FeatureMatrix x = feature_matrix(g, degrees, eks, cfg.features);

  std::vector<NodeId> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), NodeId{0});

  auto rows_of = [&](const std::vector<NodeId>& nodes) {
    std::vector<SparseFeatureVector> out;
    out.reserve(nodes.size());
    for (NodeId u : nodes) out.push_back(feature_row(x, u));
    return out;
  };
  auto targets_of = [&](const std::vector<NodeId>& nodes) {
    const auto est = estimate_vitality(g, nodes, cfg.sir, cfg.workers);
    Vector y(static_cast<Eigen::Index>(est.size()));
    for (std::size_t i = 0; i < est.size(); ++i) y[static_cast<Eigen::Index>(i)] = est[i].mean_influence;
    return y;
  };

  EmlResult res;
  if (cfg.sample.method == SamplingMethod::uniform) {
    SampleRng rng(derive_seed(cfg.sample.seed, kSampleTag));
    res.training_nodes = uniform_sample(all, s, rng);
    res.training_targets = targets_of(res.training_nodes);
  } else {
    // One (sample, targets) draw per candidate k, shared between the
    // arbitration and the final fit.
    std::map<int, std::pair<std::vector<NodeId>, Vector>> draws;
    auto draw_for = [&](int k) -> const std::pair<std::vector<NodeId>, Vector>& {
      auto it = draws.find(k);
      if (it != draws.end()) return it->second;
      SampleRng rng(derive_seed(cfg.sample.seed, kClusterTag, static_cast<std::uint64_t>(k)));
      auto clusters = kmeans(x, std::min<int>(k, n), rng);
      auto nodes = cluster_sample(clusters, s, rng);
      auto y = targets_of(nodes);
      return draws.emplace(k, std::make_pair(std::move(nodes), std::move(y))).first->second;
    };

    if (cfg.sample.k_override) {
      if (*cfg.sample.k_override < 1) throw Error("k override must be >= 1");
      res.k = *cfg.sample.k_override;
    } else if (n >= 2) {
      SampleRng rng(derive_seed(cfg.sample.seed, kChooseTag));
      FeatureMatrix scan = x;
      if (static_cast<std::size_t>(n) > cfg.choose_k_rows) {
        const auto rows = uniform_sample(all, cfg.choose_k_rows, rng);
        scan.resize(static_cast<Eigen::Index>(rows.size()), x.cols());
        std::vector<Eigen::Triplet<double>> trip;
        for (std::size_t i = 0; i < rows.size(); ++i)
          for (FeatureMatrix::InnerIterator it(x, rows[i]); it; ++it)
            trip.emplace_back(static_cast<int>(i), static_cast<int>(it.col()), it.value());
        scan.setFromTriplets(trip.begin(), trip.end());
      }
      KArbiter arbiter = [&](int k) {
        const auto& [nodes, y] = draw_for(k);
        return cross_validated_tau(rows_of(nodes), y, cfg.regressor, cfg.svr, cfg.cv_folds,
                                   derive_seed(cfg.sample.seed, kCvTag, static_cast<std::uint64_t>(k)));
      };
      res.k_selection = choose_k(scan, default_k_max(s), rng, arbiter);
      res.k = res.k_selection->k;
    }
    const auto& [nodes, y] = draw_for(res.k);
    res.training_nodes = nodes;
    res.training_targets = y;
  }

  const auto train_x = rows_of(res.training_nodes);
  if (cfg.regressor == "svr") {
    SvrRegressor svr(cfg.svr);
    svr.fit(train_x, res.training_targets);
    res.sigma = svr.model().kernel.sigma;
    res.epsilon = svr.model().epsilon;
    res.kkt_gap = svr.model().kkt_gap;
    res.predictions = svr.predict(x);
    res.model = svr.model();
  } else {
    auto model = make_regressor(cfg.regressor, cfg.svr);
    model->fit(train_x, res.training_targets);
    res.predictions = model->predict(x);
  }

  res.ranking = rank_by_score("eml", eml_score(g, res.predictions, eks, cfg.alpha));
  return res;
}

}  // namespace eml
