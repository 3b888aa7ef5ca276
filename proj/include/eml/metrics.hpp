#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eml/ranking.hpp"

namespace eml {

namespace detail {
std::optional<double> kendall_tau_b(std::vector<std::pair<double, double>> pairs);
}

/// Kendall tau-b between two score vectors over the same nodes, O(n log n).
/// Empty when either side is entirely tied. Throws for fewer than two nodes
/// or mismatched sizes.
template <typename DerivedA, typename DerivedB>
std::optional<double> kendall_tau(const Eigen::DenseBase<DerivedA>& a, const Eigen::DenseBase<DerivedB>& b) {
  if (a.size() != b.size()) throw Error("kendall_tau: size mismatch");
  std::vector<std::pair<double, double>> pairs(static_cast<std::size_t>(a.size()));
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    pairs[i] = {static_cast<double>(a.derived().coeff(i)), static_cast<double>(b.derived().coeff(i))};
  }
  return detail::kendall_tau_b(std::move(pairs));
}

/// |top_k(r) & top_k(gt)| / |top_k(r) | top_k(gt)|.
double jaccard_at_k(const Ranking& r, const Ranking& gt, std::size_t k);

/// (1 - sum_r n_r(n_r - 1) / (n(n - 1)))^2 with tie groups by exact score
/// equality.
double monotonicity(const Ranking& r);

/// Dense rank (1-based, tied scores share a rank) per node.
std::vector<std::size_t> dense_ranks(const Vector& scores);

struct HistogramBin {
  std::size_t bin_start = 1;  // first rank covered by the bin
  std::size_t count = 0;
};

std::vector<HistogramBin> rank_distribution(const Ranking& r, std::size_t bin_width);

struct EvalReport {
  std::string method;
  std::optional<double> kendall_tau;
  std::map<std::size_t, double> jaccard_at;
  double monotonicity = 0.0;
  double runtime_seconds = 0.0;
  std::vector<HistogramBin> rank_histogram;
};

EvalReport evaluate(const Ranking& r, const Ranking& ground_truth, std::span<const std::size_t> jaccard_ks,
                    std::size_t bin_width = 10, double runtime_seconds = 0.0);

std::string report_to_json(const EvalReport& report);
std::string report_csv_header(std::span<const std::size_t> jaccard_ks);
std::string report_csv_row(const EvalReport& report);
std::string histogram_csv(const std::vector<HistogramBin>& bins);

}  // namespace eml
