#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "eml/graph.hpp"
#include "eml/pipeline.hpp"

namespace eml::cli {

/// Every flag of the command-line tool. Serialized into the metadata header
/// of each output file.
struct RunConfig {
  std::string command;
  std::string input;
  std::string output;  // empty: stdout
  std::string format = "csv";
  std::string method = "eml";
  std::uint64_t seed = 1;
  unsigned threads = 0;

  std::optional<double> beta;  // default: 1.05 * epidemic threshold
  double mu = 1.0;
  std::size_t runs = 3000;

  double sample_frac = 0.005;
  std::string sampling = "cluster";
  std::optional<int> k;
  double alpha = 0.5;
  double alpha1 = 1.0;
  double alpha2 = 1.0;
  bool standardize = false;
  std::string regressor = "svr";
  double svr_c = 10.0;
  std::optional<double> svr_eps;
  std::optional<double> svr_sigma;
  std::string model_out;

  int ds_t = 5;

  std::string ranking;
  std::string truth;
  std::vector<std::size_t> jaccard_k{10, 20, 50, 100};
  std::size_t bin_width = 10;
  std::string histogram;

  std::vector<double> betas;
  std::vector<double> beta_factors;
  std::vector<std::string> methods;
};

nlohmann::json to_json(const RunConfig& cfg);

/// cfg.beta, or 1.05 times the graph's epidemic threshold.
double effective_beta(const RunConfig& cfg, const Graph& g);

EmlConfig make_eml_config(const RunConfig& cfg, double beta);

/// Scores for `method` ("eml" or a baseline name) at infection probability
/// `beta`.
Ranking compute_ranking(const Graph& g, const RunConfig& cfg, const std::string& method, double beta,
                        nlohmann::json* extra_metadata = nullptr);

void cmd_rank(const RunConfig& cfg, std::ostream& out);
void cmd_ground_truth(const RunConfig& cfg, std::ostream& out);
void cmd_evaluate(const RunConfig& cfg, std::ostream& out);
void cmd_sweep(const RunConfig& cfg, std::ostream& out);
void cmd_bench(const RunConfig& cfg, std::ostream& out);
void cmd_stats(const RunConfig& cfg, std::ostream& out);
void cmd_coreness(const RunConfig& cfg, std::ostream& out);
void cmd_features(const RunConfig& cfg, std::ostream& out);

/// Parses argv and dispatches. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace eml::cli
