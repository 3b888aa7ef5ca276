#include "eml/io.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>

namespace eml::io {

Format parse_format(std::string_view s) {
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  throw Error("unknown output format '" + std::string(s) + "'");
}

void write_ranking(std::ostream& out, const Graph& g, const Ranking& r, const nlohmann::json& metadata, Format f) {
  if (f == Format::csv) {
    out << "# " << metadata.dump() << '\n';
    out << "rank,node_label,score\n";
    for (std::size_t i = 0; i < r.order.size(); ++i) {
      out << fmt::format("{},{},{}\n", i + 1, g.label(r.order[i]), r.scores[r.order[i]]);
    }
    return;
  }
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < r.order.size(); ++i) {
    rows.push_back({{"rank", i + 1}, {"node_label", g.label(r.order[i])}, {"score", r.scores[r.order[i]]}});
  }
  out << nlohmann::json{{"metadata", metadata}, {"method", r.method}, {"rows", rows}}.dump(2) << '\n';
}

void write_vitality(std::ostream& out, const Graph& g, const std::vector<VitalityEstimate>& est,
                    const nlohmann::json& metadata, Format f) {
  if (f == Format::csv) {
    out << "# " << metadata.dump() << '\n';
    out << "node_label,mean_influence,runs\n";
    for (const auto& e : est) out << fmt::format("{},{},{}\n", g.label(e.node), e.mean_influence, e.runs);
    return;
  }
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& e : est) {
    rows.push_back({{"node_label", g.label(e.node)}, {"mean_influence", e.mean_influence}, {"runs", e.runs}});
  }
  out << nlohmann::json{{"metadata", metadata}, {"method", "ground-truth"}, {"rows", rows}}.dump(2) << '\n';
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    out.push_back(cell);
  }
  return out;
}

double parse_double(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, "not a number: '" + s + "'");
  }
}

ScoreTable read_json_table(std::istream& in) {
  ScoreTable t;
  try {
    auto j = nlohmann::json::parse(in);
    t.metadata = j.value("metadata", nlohmann::json::object());
    t.method = j.value("method", std::string());
    for (const auto& row : j.at("rows")) {
      t.labels.push_back(row.at("node_label").get<std::string>());
      if (row.contains("score")) {
        t.scores.push_back(row.at("score").get<double>());
        t.ranks.push_back(row.at("rank").get<std::size_t>());
      } else {
        t.scores.push_back(row.at("mean_influence").get<double>());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("score table json: ") + e.what());
  }
  return t;
}

}  // namespace

ScoreTable read_score_table(std::istream& in) {
  in >> std::ws;
  if (in.peek() == '{') return read_json_table(in);

  ScoreTable t;
  std::string line;
  std::size_t lineno = 0;
  int label_col = -1, score_col = -1, rank_col = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    if (line.rfind("#", 0) == 0) {
      if (t.metadata.is_null()) {
        t.metadata = nlohmann::json::parse(line.substr(1), nullptr, false);
        if (t.metadata.is_discarded()) t.metadata = nlohmann::json::object();
        if (t.metadata.is_object()) t.method = t.metadata.value("method", std::string());
      }
      continue;
    }
    auto cells = split_csv(line);
    if (label_col < 0) {
      for (int c = 0; c < static_cast<int>(cells.size()); ++c) {
        if (cells[c] == "node_label") label_col = c;
        if (cells[c] == "score" || cells[c] == "mean_influence") score_col = c;
        if (cells[c] == "rank") rank_col = c;
      }
      if (label_col < 0 || score_col < 0) throw ParseError(lineno, "expected node_label and score/mean_influence columns");
      continue;
    }
    if (static_cast<int>(cells.size()) <= std::max({label_col, score_col, rank_col})) {
      throw ParseError(lineno, "too few columns");
    }
    t.labels.push_back(cells[label_col]);
    t.scores.push_back(parse_double(cells[score_col], lineno));
    if (rank_col >= 0) t.ranks.push_back(static_cast<std::size_t>(parse_double(cells[rank_col], lineno)));
  }
  if (label_col < 0) throw Error("score table has no header");
  if (t.metadata.is_null()) t.metadata = nlohmann::json::object();
  return t;
}

ScoreTable read_score_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_score_table(in);
}

Ranking align_to(const ScoreTable& table, const std::vector<std::string>& labels, const std::string& method) {
  if (table.labels.size() != labels.size()) {
    throw Error(fmt::format("score tables cover {} and {} nodes", table.labels.size(), labels.size()));
  }
  std::unordered_map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < table.labels.size(); ++i) {
    if (!pos.emplace(table.labels[i], i).second) throw Error("duplicate node label '" + table.labels[i] + "'");
  }
  Vector scores(static_cast<Eigen::Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto it = pos.find(labels[i]);
    if (it == pos.end()) throw Error("node label '" + labels[i] + "' missing from score table");
    scores[static_cast<Eigen::Index>(i)] = table.scores[it->second];
  }
  Ranking r = rank_by_score(method, std::move(scores));
  // Keep the producer's order: explicit ranks if present, otherwise row order
  // among equal scores.
  std::vector<std::size_t> rows(table.labels.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  if (!table.ranks.empty()) {
    std::stable_sort(rows.begin(), rows.end(), [&](auto a, auto b) { return table.ranks[a] < table.ranks[b]; });
  } else {
    std::stable_sort(rows.begin(), rows.end(), [&](auto a, auto b) { return table.scores[a] > table.scores[b]; });
  }
  std::unordered_map<std::string, NodeId> id;
  for (std::size_t i = 0; i < labels.size(); ++i) id.emplace(labels[i], static_cast<NodeId>(i));
  for (std::size_t i = 0; i < rows.size(); ++i) r.order[i] = id.at(table.labels[rows[i]]);
  return r;
}

}  // namespace eml::io
