#include "eml/cli.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "eml/baselines.hpp"
#include "eml/decomposition.hpp"
#include "eml/io.hpp"
#include "eml/metrics.hpp"

namespace eml::cli {

namespace {

enum SeedTag : std::uint64_t { kTruthSeed = 11, kTrainSirSeed = 12, kSampleSeed = 13 };

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <typename T>
nlohmann::json opt_json(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

void with_output(const RunConfig& cfg, std::ostream& out, const std::function<void(std::ostream&)>& write) {
  if (cfg.output.empty()) {
    write(out);
    return;
  }
  std::ofstream file(cfg.output);
  if (!file) throw Error("cannot write '" + cfg.output + "'");
  write(file);
}

Graph load_graph(const RunConfig& cfg) {
  if (cfg.input.empty()) throw Error("--input is required");
  return read_edge_list_file(cfg.input);
}

std::vector<std::string> all_methods() {
  std::vector<std::string> m{"eml"};
  for (const auto& b : baseline_names()) m.push_back(b);
  return m;
}

nlohmann::json base_metadata(const RunConfig& cfg, const std::string& method) {
  return {{"method", method}, {"config", to_json(cfg)}};
}

std::string tau_text(const std::optional<double>& tau) { return tau ? fmt::format("{}", *tau) : "undefined"; }

}  // namespace

nlohmann::json to_json(const RunConfig& c) {
  return {{"command", c.command},   {"input", c.input},         {"output", c.output},
          {"format", c.format},     {"method", c.method},       {"seed", c.seed},
          {"threads", c.threads},   {"beta", opt_json(c.beta)}, {"mu", c.mu},
          {"runs", c.runs},         {"sample-frac", c.sample_frac}, {"sampling", c.sampling},
          {"k", opt_json(c.k)},     {"alpha", c.alpha},         {"alpha1", c.alpha1},
          {"alpha2", c.alpha2},     {"standardize", c.standardize}, {"regressor", c.regressor},
          {"svr-c", c.svr_c},       {"svr-eps", opt_json(c.svr_eps)}, {"svr-sigma", opt_json(c.svr_sigma)},
          {"model-out", c.model_out}, {"ds-t", c.ds_t},          {"ranking", c.ranking},
          {"truth", c.truth},       {"jaccard-k", c.jaccard_k}, {"bin-width", c.bin_width},
          {"histogram", c.histogram}, {"betas", c.betas},       {"beta-factors", c.beta_factors},
          {"methods", c.methods}};
}

double effective_beta(const RunConfig& cfg, const Graph& g) {
  if (cfg.beta) return *cfg.beta;
  const auto th = graph_stats(g).beta_threshold;
  if (!th) throw Error("epidemic threshold undefined for this graph; pass --beta");
  const double beta = 1.05 * *th;
  if (beta > 1.0) throw Error(fmt::format("1.05 x threshold = {} exceeds 1; pass --beta", beta));
  return beta;
}

EmlConfig make_eml_config(const RunConfig& cfg, double beta) {
  EmlConfig e;
  e.alpha = cfg.alpha;
  e.features.alpha1 = cfg.alpha1;
  e.features.alpha2 = cfg.alpha2;
  e.features.standardize = cfg.standardize;
  e.sample.fraction = cfg.sample_frac;
  e.sample.method = parse_sampling_method(cfg.sampling);
  e.sample.seed = derive_seed(cfg.seed, kSampleSeed);
  e.sample.k_override = cfg.k;
  e.sir.beta = beta;
  e.sir.mu = cfg.mu;
  e.sir.runs = cfg.runs;
  e.sir.master_seed = derive_seed(cfg.seed, kTrainSirSeed);
  e.svr.cost = cfg.svr_c;
  e.svr.epsilon = cfg.svr_eps;
  e.svr.sigma = cfg.svr_sigma;
  e.regressor = cfg.regressor;
  e.workers = cfg.threads;
  return e;
}

Ranking compute_ranking(const Graph& g, const RunConfig& cfg, const std::string& method, double beta,
                        nlohmann::json* extra) {
  if (method == "eml") {
    auto res = run_eml(g, make_eml_config(cfg, beta));
    if (extra) {
      std::vector<std::string> train;
      for (NodeId u : res.training_nodes) train.push_back(g.label(u));
      (*extra)["beta"] = beta;
      (*extra)["k"] = res.k;
      if (res.k_selection) {
        (*extra)["k_elbow"] = res.k_selection->k_elbow;
        (*extra)["k_gap"] = res.k_selection->k_gap;
      }
      (*extra)["sigma"] = res.sigma;
      (*extra)["epsilon"] = res.epsilon;
      (*extra)["alpha"] = cfg.alpha;
      (*extra)["training_nodes"] = train;
    }
    if (!cfg.model_out.empty() && res.model) {
      std::ofstream f(cfg.model_out);
      if (!f) throw Error("cannot write '" + cfg.model_out + "'");
      f << svr_to_json(*res.model) << '\n';
    }
    return res.ranking;
  }
  BaselineParams p;
  p.beta = beta;
  p.ds_t = cfg.ds_t;
  if (method == "ds" && extra) {
    (*extra)["beta"] = beta;
    (*extra)["ds_t"] = cfg.ds_t;
  }
  auto c = compute_baseline(method, g, p);
  return rank_by_score(c.method_name, std::move(c.scores));
}

void cmd_rank(const RunConfig& cfg, std::ostream& out) {
  const Graph g = load_graph(cfg);
  const auto format = io::parse_format(cfg.format);
  auto meta = base_metadata(cfg, cfg.method);
  const double beta = (cfg.method == "eml" || cfg.method == "ds") ? effective_beta(cfg, g) : 0.0;
  const auto t0 = Clock::now();
  nlohmann::json extra = nlohmann::json::object();
  Ranking r = compute_ranking(g, cfg, cfg.method, beta, &extra);
  meta["wall_clock_seconds"] = seconds_since(t0);
  meta["params"] = extra;
  with_output(cfg, out, [&](std::ostream& o) { io::write_ranking(o, g, r, meta, format); });
}

void cmd_ground_truth(const RunConfig& cfg, std::ostream& out) {
  const Graph g = load_graph(cfg);
  const auto format = io::parse_format(cfg.format);
  SirConfig sir{effective_beta(cfg, g), cfg.mu, cfg.runs, derive_seed(cfg.seed, kTruthSeed)};
  std::vector<NodeId> all(static_cast<std::size_t>(g.node_count()));
  for (NodeId u = 0; u < g.node_count(); ++u) all[u] = u;
  const auto t0 = Clock::now();
  const auto est = estimate_vitality(g, all, sir, cfg.threads);
  auto meta = base_metadata(cfg, "ground-truth");
  meta["wall_clock_seconds"] = seconds_since(t0);
  meta["params"] = {{"beta", sir.beta}, {"mu", sir.mu}, {"runs", sir.runs}};
  with_output(cfg, out, [&](std::ostream& o) { io::write_vitality(o, g, est, meta, format); });
}

void cmd_evaluate(const RunConfig& cfg, std::ostream& out) {
  if (cfg.ranking.empty() || cfg.truth.empty()) throw Error("evaluate needs --ranking and --truth");
  const auto format = io::parse_format(cfg.format);
  const auto truth_table = io::read_score_table_file(cfg.truth);
  const auto rank_table = io::read_score_table_file(cfg.ranking);
  const auto& labels = truth_table.labels;
  const Ranking truth = io::align_to(truth_table, labels, "ground-truth");
  const std::string method = rank_table.method.empty() ? "ranking" : rank_table.method;
  const Ranking r = io::align_to(rank_table, labels, method);

  std::vector<std::size_t> ks;
  for (std::size_t k : cfg.jaccard_k)
    if (k >= 1 && k <= labels.size()) ks.push_back(k);
  const double runtime = rank_table.metadata.is_object() ? rank_table.metadata.value("wall_clock_seconds", 0.0) : 0.0;
  const auto report = evaluate(r, truth, ks, cfg.bin_width, runtime);

  if (!cfg.histogram.empty()) {
    std::ofstream h(cfg.histogram);
    if (!h) throw Error("cannot write '" + cfg.histogram + "'");
    h << histogram_csv(report.rank_histogram);
  }
  with_output(cfg, out, [&](std::ostream& o) {
    if (format == io::Format::json) {
      o << report_to_json(report) << '\n';
    } else {
      o << report_csv_header(ks) << '\n' << report_csv_row(report) << '\n';
    }
  });
}

void cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  const Graph g = load_graph(cfg);
  std::vector<double> betas = cfg.betas;
  if (!cfg.beta_factors.empty()) {
    const auto th = graph_stats(g).beta_threshold;
    if (!th) throw Error("epidemic threshold undefined; use --betas");
    for (double f : cfg.beta_factors) betas.push_back(f * *th);
  }
  if (betas.empty()) throw Error("sweep needs --betas or --beta-factors");
  const auto methods = cfg.methods.empty() ? all_methods() : cfg.methods;

  std::vector<std::tuple<double, std::string, std::optional<double>>> rows;
  for (double beta : betas) {
    SirConfig sir{beta, cfg.mu, cfg.runs, derive_seed(cfg.seed, kTruthSeed)};
    const Ranking truth = ground_truth_ranking(g, sir, cfg.threads);
    for (const auto& m : methods) {
      const Ranking r = compute_ranking(g, cfg, m, beta);
      rows.emplace_back(beta, m, kendall_tau(r.scores, truth.scores));
    }
  }
  const auto format = io::parse_format(cfg.format);
  with_output(cfg, out, [&](std::ostream& o) {
    if (format == io::Format::json) {
      nlohmann::json j = nlohmann::json::array();
      for (const auto& [b, m, t] : rows) j.push_back({{"beta", b}, {"method", m}, {"tau", opt_json(t)}});
      o << nlohmann::json{{"metadata", base_metadata(cfg, "sweep")}, {"rows", j}}.dump(2) << '\n';
      return;
    }
    o << "# " << base_metadata(cfg, "sweep").dump() << '\n' << "beta,method,tau\n";
    for (const auto& [b, m, t] : rows) o << fmt::format("{},{},{}\n", b, m, tau_text(t));
  });
}

void cmd_bench(const RunConfig& cfg, std::ostream& out) {
  const Graph g = load_graph(cfg);
  const auto methods = cfg.methods.empty() ? all_methods() : cfg.methods;
  std::vector<std::pair<std::string, double>> rows;
  for (const auto& m : methods) {
    const double beta = (m == "eml" || m == "ds") ? effective_beta(cfg, g) : 0.0;
    const auto t0 = Clock::now();
    const Ranking r = compute_ranking(g, cfg, m, beta);
    rows.emplace_back(m, seconds_since(t0));
  }
  const auto format = io::parse_format(cfg.format);
  with_output(cfg, out, [&](std::ostream& o) {
    if (format == io::Format::json) {
      nlohmann::json j = nlohmann::json::array();
      for (const auto& [m, s] : rows) j.push_back({{"method", m}, {"seconds", s}});
      o << nlohmann::json{{"metadata", base_metadata(cfg, "bench")}, {"rows", j}}.dump(2) << '\n';
      return;
    }
    o << "# " << base_metadata(cfg, "bench").dump() << '\n' << "method,seconds\n";
    for (const auto& [m, s] : rows) o << fmt::format("{},{}\n", m, s);
  });
}

void cmd_stats(const RunConfig& cfg, std::ostream& out) {
  const auto s = graph_stats(load_graph(cfg));
  with_output(cfg, out, [&](std::ostream& o) {
    if (io::parse_format(cfg.format) == io::Format::json) {
      o << stats_to_json(s) << '\n';
    } else {
      o << stats_csv_header() << '\n' << stats_csv_row(s) << '\n';
    }
  });
}

void cmd_coreness(const RunConfig& cfg, std::ostream& out) {
  const Graph g = load_graph(cfg);
  with_output(cfg, out, [&](std::ostream& o) { write_coreness_csv(g, o); });
}

void cmd_features(const RunConfig& cfg, std::ostream& out) {
  const Graph g = load_graph(cfg);
  FeatureWeights w{cfg.alpha1, cfg.alpha2, cfg.standardize};
  const auto x = feature_matrix(g, w);
  with_output(cfg, out, [&](std::ostream& o) { write_feature_csv(g, x, o); });
}

namespace {

// Flat JSON object whose keys are long flag names without dashes.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    nlohmann::json j = nlohmann::json::object();
    for (const CLI::Option* opt : app->get_options()) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const auto& name = opt->get_lnames().front();
      if (opt->count() > 0) {
        auto res = opt->results();
        j[name] = res.size() == 1 ? nlohmann::json(res.front()) : nlohmann::json(res);
      } else if (default_also && !opt->get_default_str().empty()) {
        j[name] = opt->get_default_str();
      }
    }
    return j.dump(2);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(input);
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError(std::string("config file: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
    std::vector<CLI::ConfigItem> items;
    auto text = [](const nlohmann::json& v) {
      if (v.is_string()) return v.get<std::string>();
      if (v.is_boolean()) return std::string(v.get<bool>() ? "true" : "false");
      return v.dump();
    };
    for (const auto& [key, value] : j.items()) {
      if (value.is_null()) continue;
      CLI::ConfigItem item;
      item.name = key;
      if (value.is_array()) {
        for (const auto& e : value) item.inputs.push_back(text(e));
      } else {
        item.inputs.push_back(text(value));
      }
      items.push_back(std::move(item));
    }
    return items;
  }
};

constexpr const char* kFormatsHelp = R"(Output columns:
  rank, sweep --method rows : rank,node_label,score
  ground-truth              : node_label,mean_influence,runs
  evaluate (csv)            : method,kendall_tau,monotonicity,runtime_seconds,jaccard_<k>...
  evaluate --histogram      : bin_start,count
  sweep                     : beta,method,tau
  bench                     : method,seconds
  stats                     : n,m,max_deg,avg_deg,mean_deg_sq,beta_th
  coreness                  : node_label,degree,ks,h_index,eks
  features                  : node,neighbour,value
CSV files start with one '# {json}' metadata line. See FORMATS.md.)";

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Vital node ranking: EML pipeline, baselines, SIR ground truth, evaluation", "eml"};
  app.footer(kFormatsHelp);
  app.fallthrough();
  app.require_subcommand(1, 1);
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file mirroring the flags; flags given on the command line win");

  double beta = 0, svr_eps = 0, svr_sigma = 0;
  int k = 0;
  app.add_option("--input,-i", cfg.input, "Edge list file");
  app.add_option("--output,-o", cfg.output, "Output file (default stdout)");
  app.add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--method", cfg.method, "eml or a baseline: degree ks hindex lh localrank cnc eks-sum ls ds");
  app.add_option("--seed", cfg.seed, "Master seed");
  app.add_option("--threads", cfg.threads, "Worker threads for SIR (0 = all cores)");
  auto* beta_opt = app.add_option("--beta", beta, "Infection probability (default 1.05 x threshold)");
  app.add_option("--mu", cfg.mu, "Recovery probability");
  app.add_option("--runs", cfg.runs, "SIR runs per node");
  app.add_option("--sample-frac", cfg.sample_frac, "Training sample fraction");
  app.add_option("--sampling", cfg.sampling, "uniform or cluster")->check(CLI::IsMember({"uniform", "cluster"}));
  auto* k_opt = app.add_option("--k", k, "Cluster count override");
  app.add_option("--alpha", cfg.alpha, "Neighbour weight in [0,1]");
  app.add_option("--alpha1", cfg.alpha1, "Degree feature weight");
  app.add_option("--alpha2", cfg.alpha2, "Extended coreness feature weight");
  app.add_flag("--standardize", cfg.standardize, "Scale feature columns to unit RMS");
  app.add_option("--regressor", cfg.regressor, "svr or knn")->check(CLI::IsMember({"svr", "knn"}));
  app.add_option("--svr-c", cfg.svr_c, "SVR cost C");
  auto* eps_opt = app.add_option("--svr-eps", svr_eps, "SVR epsilon (default 1% of target range)");
  auto* sigma_opt = app.add_option("--svr-sigma", svr_sigma, "RBF bandwidth (default median heuristic)");
  app.add_option("--model-out", cfg.model_out, "Write the trained SVR model as JSON");
  app.add_option("--ds-t", cfg.ds_t, "DS horizon t");
  app.add_option("--ranking", cfg.ranking, "Ranking file to evaluate");
  app.add_option("--truth", cfg.truth, "Ground-truth file");
  app.add_option("--jaccard-k", cfg.jaccard_k, "Top-k sizes for Jaccard");
  app.add_option("--bin-width", cfg.bin_width, "Rank histogram bin width");
  app.add_option("--histogram", cfg.histogram, "Write the rank histogram CSV here");
  app.add_option("--betas", cfg.betas, "Sweep: absolute beta values");
  app.add_option("--beta-factors", cfg.beta_factors, "Sweep: multiples of the epidemic threshold");
  app.add_option("--methods", cfg.methods, "Sweep/bench: methods (default all)");

  app.add_subcommand("rank", "Rank nodes with EML or a baseline");
  app.add_subcommand("ground-truth", "Mean SIR influence of every node");
  app.add_subcommand("evaluate", "Compare a ranking with ground truth");
  app.add_subcommand("sweep", "Kendall tau per method across beta values");
  app.add_subcommand("bench", "Wall-clock time per method");
  app.add_subcommand("stats", "Graph statistics and epidemic threshold");
  app.add_subcommand("coreness", "Degree, shell, H-index and extended coreness per node");
  app.add_subcommand("features", "Sparse feature matrix triples");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  if (beta_opt->count() > 0) cfg.beta = beta;
  if (k_opt->count() > 0) cfg.k = k;
  if (eps_opt->count() > 0) cfg.svr_eps = svr_eps;
  if (sigma_opt->count() > 0) cfg.svr_sigma = svr_sigma;
  cfg.command = app.get_subcommands().front()->get_name();

  try {
    if (cfg.command == "rank") cmd_rank(cfg, out);
    else if (cfg.command == "ground-truth") cmd_ground_truth(cfg, out);
    else if (cfg.command == "evaluate") cmd_evaluate(cfg, out);
    else if (cfg.command == "sweep") cmd_sweep(cfg, out);
    else if (cfg.command == "bench") cmd_bench(cfg, out);
    else if (cfg.command == "stats") cmd_stats(cfg, out);
    else if (cfg.command == "coreness") cmd_coreness(cfg, out);
    else if (cfg.command == "features") cmd_features(cfg, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace eml::cli
