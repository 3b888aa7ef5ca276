#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "eml/features.hpp"

namespace eml {

/// Gaussian kernel exp(-||x - x'||^2 / (dim * sigma^2)).
struct RbfKernel {
  double sigma = 1.0;
  Eigen::Index dim = 1;  // feature count m

  double operator()(const SparseFeatureVector& x, const SparseFeatureVector& y) const;
};

/// Throws eml::Error on dimension mismatch.
double rbf(const RbfKernel& kernel, const SparseFeatureVector& x, const SparseFeatureVector& y);

struct SvrParams {
  double cost = 10.0;
  std::optional<double> epsilon;  // default: 1% of the target range
  std::optional<double> sigma;    // default: median heuristic
  double tolerance = 1e-8;        // stopping gap on the dual KKT conditions
  std::size_t max_iterations = 50'000'000;
};

/// Solution of the epsilon-SVR dual
///   min 1/2 w'Kw + eps*|w|_1 - y'w   s.t.  sum(w) = 0, |w_i| <= C
/// written in the usual split form w = alpha - alpha*.
struct SvrDualSolution {
  Vector coefficients;  // w
  double bias = 0.0;
  double objective = 0.0;
  double kkt_gap = 0.0;  // max violating-pair gap at exit
  std::size_t iterations = 0;
};

/// Two-coordinate (SMO) ascent with second-order working-set selection.
SvrDualSolution solve_svr_dual(const Eigen::MatrixXd& kernel, const Vector& targets, double cost, double epsilon,
                               double tolerance = 1e-8, std::size_t max_iterations = 50'000'000);

double svr_dual_objective(const Eigen::MatrixXd& kernel, const Vector& targets, double epsilon, const Vector& w);

struct SvrModel {
  std::vector<SparseFeatureVector> support_vectors;
  Vector coefficients;  // one per support vector
  double bias = 0.0;
  RbfKernel kernel;
  double epsilon = 0.0;
  double cost = 1.0;
  double kkt_gap = 0.0;
};

/// Median of pairwise squared distances divided by dim, square-rooted; 1 when
/// every pair coincides.
double median_heuristic_sigma(std::span<const SparseFeatureVector> x);

SvrModel train_svr(std::span<const SparseFeatureVector> x, const Vector& y, const SvrParams& params = {});

double predict(const SvrModel& model, const SparseFeatureVector& x);
Vector predict(const SvrModel& model, const FeatureMatrix& rows);

std::string svr_to_json(const SvrModel& model);
SvrModel svr_from_json(std::string_view text);

/// Anything that maps a feature vector to a real after fitting.
class Regressor {
 public:
  virtual ~Regressor() = default;
  virtual std::string name() const = 0;
  virtual void fit(std::span<const SparseFeatureVector> x, const Vector& y) = 0;
  virtual double predict(const SparseFeatureVector& x) const = 0;
  Vector predict(const FeatureMatrix& rows) const;
};

class SvrRegressor final : public Regressor {
 public:
  explicit SvrRegressor(SvrParams params = {}) : params_(params) {}
  using Regressor::predict;
  std::string name() const override { return "svr"; }
  void fit(std::span<const SparseFeatureVector> x, const Vector& y) override;
  double predict(const SparseFeatureVector& x) const override;
  const SvrModel& model() const;

 private:
  SvrParams params_;
  std::optional<SvrModel> model_;
};

/// Mean target of the k nearest training vectors (Euclidean).
class KnnRegressor final : public Regressor {
 public:
  explicit KnnRegressor(int k = 3) : k_(k) {}
  using Regressor::predict;
  std::string name() const override { return "knn"; }
  void fit(std::span<const SparseFeatureVector> x, const Vector& y) override;
  double predict(const SparseFeatureVector& x) const override;

 private:
  int k_;
  std::vector<SparseFeatureVector> x_;
  Vector y_;
};

/// "svr" or "knn".
std::unique_ptr<Regressor> make_regressor(std::string_view name, const SvrParams& params = {});

}  // namespace eml
