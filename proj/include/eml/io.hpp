#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "eml/graph.hpp"
#include "eml/ranking.hpp"
#include "eml/sir.hpp"

namespace eml::io {

enum class Format { csv, json };
Format parse_format(std::string_view s);

/// Ranking rows (rank, node_label, score) preceded by a metadata header.
/// CSV puts the metadata on one leading "# " comment line.
void write_ranking(std::ostream& out, const Graph& g, const Ranking& r, const nlohmann::json& metadata, Format f);

/// node_label, mean_influence, runs in node-id order.
void write_vitality(std::ostream& out, const Graph& g, const std::vector<VitalityEstimate>& est,
                    const nlohmann::json& metadata, Format f);

/// Any labelled score table this tool writes: rankings (score column) or
/// vitality files (mean_influence column), CSV or JSON.
struct ScoreTable {
  std::string method;
  std::vector<std::string> labels;
  std::vector<double> scores;
  std::vector<std::size_t> ranks;  // empty for vitality tables
  nlohmann::json metadata;
};

ScoreTable read_score_table(std::istream& in);
ScoreTable read_score_table_file(const std::string& path);

/// Scores of `table` re-indexed to follow `labels`; throws if the label sets
/// differ.
Ranking align_to(const ScoreTable& table, const std::vector<std::string>& labels, const std::string& method);

}  // namespace eml::io
