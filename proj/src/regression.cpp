#include "eml/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>
#include <json.hpp>

namespace eml {

double RbfKernel::operator()(const SparseFeatureVector& x, const SparseFeatureVector& y) const {
  return rbf(*this, x, y);
}

double rbf(const RbfKernel& kernel, const SparseFeatureVector& x, const SparseFeatureVector& y) {
  if (x.size() != kernel.dim || y.size() != kernel.dim) {
    throw Error(fmt::format("rbf: dimension mismatch ({}, {}) vs kernel dim {}", x.size(), y.size(), kernel.dim));
  }
  const double d2 = (x - y).squaredNorm();
  return std::exp(-d2 / (static_cast<double>(kernel.dim) * kernel.sigma * kernel.sigma));
}

namespace {

constexpr double kTau = 1e-12;

Eigen::MatrixXd gram(const RbfKernel& k, std::span<const SparseFeatureVector> x) {
  const auto l = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd K(l, l);
  for (Eigen::Index i = 0; i < l; ++i) {
    K(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < l; ++j) K(i, j) = K(j, i) = rbf(k, x[i], x[j]);
  }
  return K;
}

}  // namespace

double svr_dual_objective(const Eigen::MatrixXd& kernel, const Vector& targets, double epsilon, const Vector& w) {
  return 0.5 * w.dot(kernel * w) + epsilon * w.lpNorm<1>() - targets.dot(w);
}

SvrDualSolution solve_svr_dual(const Eigen::MatrixXd& kernel, const Vector& targets, double cost, double epsilon,
                               double tolerance, std::size_t max_iterations) {
  const Eigen::Index l = targets.size();
  if (l < 1) throw Error("train_svr: need at least one sample");
  if (kernel.rows() != l || kernel.cols() != l) throw Error("train_svr: kernel/target size mismatch");
  if (!(cost > 0.0)) throw Error("train_svr: cost must be > 0");
  if (!(epsilon >= 0.0)) throw Error("train_svr: epsilon must be >= 0");
  if (!targets.allFinite()) throw Error("train_svr: non-finite target");

  // Split variables: t < l is alpha_t (sign +1), t >= l is alpha*_{t-l} (sign -1).
  const Eigen::Index n = 2 * l;
  Vector a = Vector::Zero(n);
  Vector grad(n);
  Eigen::VectorXi sign(n);
  for (Eigen::Index t = 0; t < l; ++t) {
    sign[t] = 1;
    sign[t + l] = -1;
    grad[t] = epsilon - targets[t];
    grad[t + l] = epsilon + targets[t];
  }
  auto base = [l](Eigen::Index t) { return t < l ? t : t - l; };
  auto q = [&](Eigen::Index i, Eigen::Index j) { return sign[i] * sign[j] * kernel(base(i), base(j)); };
  auto at_upper = [&](Eigen::Index t) { return a[t] >= cost; };
  auto at_lower = [&](Eigen::Index t) { return a[t] <= 0.0; };

  SvrDualSolution sol;
  double gap = 0.0;
  std::size_t iter = 0;
  for (;; ++iter) {
    double gmax = -std::numeric_limits<double>::infinity();
    Eigen::Index i = -1;
    for (Eigen::Index t = 0; t < n; ++t) {
      const bool up = sign[t] == 1 ? !at_upper(t) : !at_lower(t);
      if (up && -sign[t] * grad[t] >= gmax) {
        gmax = -sign[t] * grad[t];
        i = t;
      }
    }
    double gmax2 = -std::numeric_limits<double>::infinity();
    Eigen::Index j = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      const bool low = sign[t] == 1 ? !at_lower(t) : !at_upper(t);
      if (!low) continue;
      gmax2 = std::max(gmax2, sign[t] * grad[t]);
      const double diff = gmax + sign[t] * grad[t];
      if (i >= 0 && diff > 0.0) {
        const Eigen::Index bi = base(i), bt = base(t);
        double quad = kernel(bi, bi) + kernel(bt, bt) - 2.0 * kernel(bi, bt);
        quad = std::max(quad, kTau);
        const double obj = -(diff * diff) / quad;
        if (obj <= best) {
          best = obj;
          j = t;
        }
      }
    }
    gap = gmax + gmax2;
    if (i < 0 || j < 0 || gap < tolerance || iter >= max_iterations) break;

    const double ai = a[i], aj = a[j];
    if (sign[i] != sign[j]) {
      double quad = std::max(q(i, i) + q(j, j) + 2.0 * q(i, j), kTau);
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = a[i] - a[j];
      a[i] += delta;
      a[j] += delta;
      if (diff > 0.0) {
        if (a[j] < 0.0) { a[j] = 0.0; a[i] = diff; }
      } else {
        if (a[i] < 0.0) { a[i] = 0.0; a[j] = -diff; }
      }
      if (diff > 0.0) {
        if (a[i] > cost) { a[i] = cost; a[j] = cost - diff; }
      } else {
        if (a[j] > cost) { a[j] = cost; a[i] = cost + diff; }
      }
    } else {
      double quad = std::max(q(i, i) + q(j, j) - 2.0 * q(i, j), kTau);
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = a[i] + a[j];
      a[i] -= delta;
      a[j] += delta;
      if (sum > cost) {
        if (a[i] > cost) { a[i] = cost; a[j] = sum - cost; }
      } else {
        if (a[j] < 0.0) { a[j] = 0.0; a[i] = sum; }
      }
      if (sum > cost) {
        if (a[j] > cost) { a[j] = cost; a[i] = sum - cost; }
      } else {
        if (a[i] < 0.0) { a[i] = 0.0; a[j] = sum; }
      }
    }
    const double dai = a[i] - ai, daj = a[j] - aj;
    for (Eigen::Index t = 0; t < n; ++t) grad[t] += q(i, t) * dai + q(j, t) * daj;
  }

  // Bias from the KKT conditions: average over free variables, otherwise the
  // midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  int free_count = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double yg = sign[t] * grad[t];
    if (at_upper(t)) {
      if (sign[t] == -1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (at_lower(t)) {
      if (sign[t] == 1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++free_count;
      sum_free += yg;
    }
  }
  const double rho = free_count > 0 ? sum_free / free_count : 0.5 * (ub + lb);

  sol.coefficients = a.head(l) - a.tail(l);
  sol.bias = -rho;
  sol.objective = svr_dual_objective(kernel, targets, epsilon, sol.coefficients);
  sol.kkt_gap = std::max(gap, 0.0);
  sol.iterations = iter;
  return sol;
}

double median_heuristic_sigma(std::span<const SparseFeatureVector> x) {
  if (x.empty()) return 1.0;
  std::vector<double> d2;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) d2.push_back((x[i] - x[j]).squaredNorm());
  std::erase_if(d2, [](double v) { return !(v > 0.0); });
  if (d2.empty()) return 1.0;
  auto mid = d2.begin() + static_cast<std::ptrdiff_t>(d2.size() / 2);
  std::nth_element(d2.begin(), mid, d2.end());
  double med = *mid;
  if (d2.size() % 2 == 0) {
    med = 0.5 * (med + *std::max_element(d2.begin(), mid));
  }
  return std::sqrt(med / static_cast<double>(x.front().size()));
}

SvrModel train_svr(std::span<const SparseFeatureVector> x, const Vector& y, const SvrParams& params) {
  if (x.empty()) throw Error("train_svr: need at least one sample");
  if (static_cast<Eigen::Index>(x.size()) != y.size()) throw Error("train_svr: sample/target count mismatch");
  if (!y.allFinite()) throw Error("train_svr: non-finite target");
  const Eigen::Index dim = x.front().size();
  for (const auto& v : x) {
    if (v.size() != dim) throw Error("train_svr: inconsistent feature dimension");
  }

  SvrModel model;
  model.kernel.dim = dim;
  model.kernel.sigma = params.sigma.value_or(median_heuristic_sigma(x));
  if (!(model.kernel.sigma > 0.0)) throw Error("train_svr: sigma must be > 0");
  model.epsilon = params.epsilon.value_or(0.01 * (y.maxCoeff() - y.minCoeff()));
  model.cost = params.cost;

  const auto sol = solve_svr_dual(gram(model.kernel, x), y, params.cost, model.epsilon, params.tolerance,
                                  params.max_iterations);
  model.bias = sol.bias;
  model.kkt_gap = sol.kkt_gap;
  std::vector<double> coef;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (sol.coefficients[i] != 0.0) {
      model.support_vectors.push_back(x[i]);
      coef.push_back(sol.coefficients[i]);
    }
  }
  model.coefficients = Eigen::Map<const Vector>(coef.data(), static_cast<Eigen::Index>(coef.size()));
  return model;
}

double predict(const SvrModel& model, const SparseFeatureVector& x) {
  if (x.size() != model.kernel.dim) {
    throw Error(fmt::format("predict: dimension {} does not match model dimension {}", x.size(), model.kernel.dim));
  }
  double f = model.bias;
  for (std::size_t i = 0; i < model.support_vectors.size(); ++i) {
    f += model.coefficients[static_cast<Eigen::Index>(i)] * rbf(model.kernel, x, model.support_vectors[i]);
  }
  return f;
}

Vector predict(const SvrModel& model, const FeatureMatrix& rows) {
  Vector out(rows.rows());
  for (Eigen::Index u = 0; u < rows.rows(); ++u) out[u] = predict(model, SparseFeatureVector(rows.row(u).transpose()));
  return out;
}

std::string svr_to_json(const SvrModel& model) {
  nlohmann::json sv = nlohmann::json::array();
  for (std::size_t i = 0; i < model.support_vectors.size(); ++i) {
    nlohmann::json entries = nlohmann::json::array();
    for (SparseFeatureVector::InnerIterator it(model.support_vectors[i]); it; ++it) {
      entries.push_back({it.index(), it.value()});
    }
    sv.push_back({{"coefficient", model.coefficients[static_cast<Eigen::Index>(i)]}, {"entries", entries}});
  }
  nlohmann::json j{{"dim", model.kernel.dim}, {"sigma", model.kernel.sigma}, {"epsilon", model.epsilon},
                   {"cost", model.cost},      {"bias", model.bias},         {"support_vectors", sv}};
  return j.dump(2);
}

SvrModel svr_from_json(std::string_view text) {
  SvrModel m;
  try {
    auto j = nlohmann::json::parse(text);
    m.kernel.dim = j.at("dim").get<Eigen::Index>();
    m.kernel.sigma = j.at("sigma").get<double>();
    m.epsilon = j.at("epsilon").get<double>();
    m.cost = j.at("cost").get<double>();
    m.bias = j.at("bias").get<double>();
    const auto& sv = j.at("support_vectors");
    m.coefficients.resize(static_cast<Eigen::Index>(sv.size()));
    for (std::size_t i = 0; i < sv.size(); ++i) {
      m.coefficients[static_cast<Eigen::Index>(i)] = sv[i].at("coefficient").get<double>();
      SparseFeatureVector v(m.kernel.dim);
      for (const auto& e : sv[i].at("entries")) v.coeffRef(e.at(0).get<Eigen::Index>()) = e.at(1).get<double>();
      m.support_vectors.push_back(std::move(v));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("svr model json: ") + e.what());
  }
  return m;
}

Vector Regressor::predict(const FeatureMatrix& rows) const {
  Vector out(rows.rows());
  for (Eigen::Index u = 0; u < rows.rows(); ++u) out[u] = predict(SparseFeatureVector(rows.row(u).transpose()));
  return out;
}

void SvrRegressor::fit(std::span<const SparseFeatureVector> x, const Vector& y) { model_ = train_svr(x, y, params_); }

double SvrRegressor::predict(const SparseFeatureVector& x) const { return eml::predict(model(), x); }

const SvrModel& SvrRegressor::model() const {
  if (!model_) throw Error("svr regressor used before fit");
  return *model_;
}

void KnnRegressor::fit(std::span<const SparseFeatureVector> x, const Vector& y) {
  if (x.empty() || static_cast<Eigen::Index>(x.size()) != y.size()) throw Error("knn: bad training set");
  if (!y.allFinite()) throw Error("knn: non-finite target");
  x_.assign(x.begin(), x.end());
  y_ = y;
}

double KnnRegressor::predict(const SparseFeatureVector& x) const {
  if (x_.empty()) throw Error("knn regressor used before fit");
  std::vector<std::pair<double, std::size_t>> d(x_.size());
  for (std::size_t i = 0; i < x_.size(); ++i) d[i] = {(x - x_[i]).squaredNorm(), i};
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(std::max(k_, 1)), d.size());
  std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) s += y_[static_cast<Eigen::Index>(d[i].second)];
  return s / static_cast<double>(k);
}

std::unique_ptr<Regressor> make_regressor(std::string_view name, const SvrParams& params) {
  if (name == "svr") return std::make_unique<SvrRegressor>(params);
  if (name == "knn") return std::make_unique<KnnRegressor>();
  throw Error("unknown regressor '" + std::string(name) + "'");
}

}  // namespace eml
