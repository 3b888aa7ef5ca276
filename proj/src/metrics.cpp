#include "eml/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_set>

#include <fmt/format.h>
#include <json.hpp>

namespace eml {

namespace {

std::int64_t tie_pairs(std::span<const double> sorted) {
  std::int64_t total = 0, run = 1;
  for (std::size_t i = 1; i <= sorted.size(); ++i) {
    if (i < sorted.size() && sorted[i] == sorted[i - 1]) {
      ++run;
    } else {
      total += run * (run - 1) / 2;
      run = 1;
    }
  }
  return total;
}

// Sorts `v` ascending and returns the number of inversions.
std::int64_t merge_count(std::vector<double>& v) {
  std::vector<double> buf(v.size());
  std::int64_t swaps = 0;
  for (std::size_t width = 1; width < v.size(); width *= 2) {
    for (std::size_t lo = 0; lo < v.size(); lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, v.size());
      const std::size_t hi = std::min(lo + 2 * width, v.size());
      std::size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (v[j] < v[i]) {
          swaps += static_cast<std::int64_t>(mid - i);
          buf[k++] = v[j++];
        } else {
          buf[k++] = v[i++];
        }
      }
      while (i < mid) buf[k++] = v[i++];
      while (j < hi) buf[k++] = v[j++];
    }
    v.swap(buf);
  }
  return swaps;
}

}  // namespace

std::optional<double> detail::kendall_tau_b(std::vector<std::pair<double, double>> pairs) {
  const auto n = static_cast<std::int64_t>(pairs.size());
  if (n < 2) throw Error("kendall_tau: need at least two nodes");
  for (const auto& [x, y] : pairs) {
    if (std::isnan(x) || std::isnan(y)) throw Error("kendall_tau: NaN score");
  }
  std::sort(pairs.begin(), pairs.end());
  const std::int64_t n0 = n * (n - 1) / 2;

  std::vector<double> a(pairs.size()), b(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    a[i] = pairs[i].first;
    b[i] = pairs[i].second;
  }
  const std::int64_t n1 = tie_pairs(a);
  std::int64_t n3 = 0, run = 1;
  for (std::size_t i = 1; i <= pairs.size(); ++i) {
    if (i < pairs.size() && pairs[i] == pairs[i - 1]) {
      ++run;
    } else {
      n3 += run * (run - 1) / 2;
      run = 1;
    }
  }
  const std::int64_t swaps = merge_count(b);
  const std::int64_t n2 = tie_pairs(b);

  if (n0 == n1 || n0 == n2) return std::nullopt;
  const double num = static_cast<double>(n0 - n1 - n2 + n3 - 2 * swaps);
  return num / std::sqrt(static_cast<double>(n0 - n1) * static_cast<double>(n0 - n2));
}

double jaccard_at_k(const Ranking& r, const Ranking& gt, std::size_t k) {
  if (r.size() != gt.size()) throw Error("jaccard_at_k: rankings cover different node counts");
  if (k < 1 || k > r.size()) throw Error(fmt::format("jaccard_at_k: k = {} outside [1, {}]", k, r.size()));
  std::unordered_set<NodeId> top(r.order.begin(), r.order.begin() + static_cast<std::ptrdiff_t>(k));
  std::size_t shared = 0;
  for (std::size_t i = 0; i < k; ++i) shared += top.count(gt.order[i]);
  return static_cast<double>(shared) / static_cast<double>(2 * k - shared);
}

double monotonicity(const Ranking& r) {
  const auto n = static_cast<std::int64_t>(r.scores.size());
  if (n < 2) throw Error("monotonicity: need at least two nodes");
  std::vector<double> s(r.scores.data(), r.scores.data() + n);
  std::sort(s.begin(), s.end());
  const double tied = 2.0 * static_cast<double>(tie_pairs(s));  // sum n_r (n_r - 1)
  const double frac = tied / (static_cast<double>(n) * static_cast<double>(n - 1));
  return (1.0 - frac) * (1.0 - frac);
}

std::vector<std::size_t> dense_ranks(const Vector& scores) {
  std::vector<double> distinct(scores.data(), scores.data() + scores.size());
  std::sort(distinct.begin(), distinct.end(), std::greater<>());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<std::size_t> out(static_cast<std::size_t>(scores.size()));
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    auto it = std::lower_bound(distinct.begin(), distinct.end(), scores[i], std::greater<>());
    out[i] = static_cast<std::size_t>(it - distinct.begin()) + 1;
  }
  return out;
}

std::vector<HistogramBin> rank_distribution(const Ranking& r, std::size_t bin_width) {
  if (bin_width < 1) throw Error("rank_distribution: bin width must be >= 1");
  std::vector<HistogramBin> bins;
  for (std::size_t rank : dense_ranks(r.scores)) {
    const std::size_t b = (rank - 1) / bin_width;
    if (b >= bins.size()) {
      const auto old = bins.size();
      bins.resize(b + 1);
      for (std::size_t i = old; i <= b; ++i) bins[i].bin_start = i * bin_width + 1;
    }
    ++bins[b].count;
  }
  return bins;
}

EvalReport evaluate(const Ranking& r, const Ranking& ground_truth, std::span<const std::size_t> jaccard_ks,
                    std::size_t bin_width, double runtime_seconds) {
  EvalReport rep;
  rep.method = r.method;
  rep.kendall_tau = kendall_tau(r.scores, ground_truth.scores);
  for (std::size_t k : jaccard_ks) rep.jaccard_at[k] = jaccard_at_k(r, ground_truth, k);
  rep.monotonicity = monotonicity(r);
  rep.runtime_seconds = runtime_seconds;
  rep.rank_histogram = rank_distribution(r, bin_width);
  return rep;
}

std::string report_to_json(const EvalReport& report) {
  nlohmann::json j;
  j["method_name"] = report.method;
  j["kendall_tau"] = report.kendall_tau ? nlohmann::json(*report.kendall_tau) : nlohmann::json(nullptr);
  nlohmann::json jac = nlohmann::json::object();
  for (const auto& [k, v] : report.jaccard_at) jac[std::to_string(k)] = v;
  j["jaccard_at"] = jac;
  j["monotonicity"] = report.monotonicity;
  j["runtime_seconds"] = report.runtime_seconds;
  nlohmann::json hist = nlohmann::json::array();
  for (const auto& b : report.rank_histogram) hist.push_back({{"bin_start", b.bin_start}, {"count", b.count}});
  j["rank_histogram"] = hist;
  return j.dump(2);
}

std::string report_csv_header(std::span<const std::size_t> jaccard_ks) {
  std::string h = "method,kendall_tau,monotonicity,runtime_seconds";
  for (std::size_t k : jaccard_ks) h += fmt::format(",jaccard_{}", k);
  return h;
}

std::string report_csv_row(const EvalReport& report) {
  std::string row = fmt::format("{},{},{},{}", report.method,
                                report.kendall_tau ? fmt::format("{}", *report.kendall_tau) : "undefined",
                                report.monotonicity, report.runtime_seconds);
  for (const auto& [k, v] : report.jaccard_at) row += fmt::format(",{}", v);
  return row;
}

std::string histogram_csv(const std::vector<HistogramBin>& bins) {
  std::string out = "bin_start,count\n";
  for (const auto& b : bins) out += fmt::format("{},{}\n", b.bin_start, b.count);
  return out;
}

}  // namespace eml
