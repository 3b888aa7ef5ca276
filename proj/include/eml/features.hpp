#pragma once

#include <iosfwd>

#include <Eigen/SparseCore>

#include "eml/graph.hpp"

namespace eml {

/// |V|-dimensional node representation; nonzero only at the node's neighbours.
using SparseFeatureVector = Eigen::SparseVector<double>;
/// One SparseFeatureVector per row.
using FeatureMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct FeatureWeights {
  double alpha1 = 1.0;  // degree weight
  double alpha2 = 1.0;  // extended-coreness weight
  /// Divide each column by its root-mean-square over all nodes (no centering,
  /// so sparsity is kept). Off by default.
  bool standardize = false;

  void validate() const;
};

Vector degree_vector(const Graph& g);
Vector coreness_vector(const Graph& g);

/// X(u)[v] = alpha1 * degree(v) + alpha2 * eks(v) for v adjacent to u, else 0.
SparseFeatureVector feature_vector(const Graph& g, NodeId u, const FeatureWeights& w = {});

FeatureMatrix feature_matrix(const Graph& g, const FeatureWeights& w = {});

/// Same, reusing precomputed degree and eks vectors.
FeatureMatrix feature_matrix(const Graph& g, const Vector& degrees, const Vector& eks, const FeatureWeights& w);

SparseFeatureVector feature_row(const FeatureMatrix& x, NodeId u);

/// CSV triples node,neighbour,value using external labels.
void write_feature_csv(const Graph& g, const FeatureMatrix& x, std::ostream& out);

}  // namespace eml
