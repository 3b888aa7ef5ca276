#include "eml/features.hpp"

#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "eml/decomposition.hpp"

namespace eml {

void FeatureWeights::validate() const {
  if (!(alpha1 >= 0.0) || !(alpha2 >= 0.0)) throw Error("feature weights must be non-negative");
  if (alpha1 == 0.0 && alpha2 == 0.0) throw Error("feature weights alpha1 and alpha2 cannot both be zero");
}

Vector degree_vector(const Graph& g) {
  Vector d(g.node_count());
  for (NodeId u = 0; u < g.node_count(); ++u) d[u] = static_cast<double>(g.neighbors(u).size());
  return d;
}

Vector coreness_vector(const Graph& g) { return extended_coreness(g, k_shell(g)); }

FeatureMatrix feature_matrix(const Graph& g, const Vector& degrees, const Vector& eks, const FeatureWeights& w) {
  w.validate();
  const NodeId n = g.node_count();
  const Vector column_value = w.alpha1 * degrees + w.alpha2 * eks;

  Vector column_scale = Vector::Ones(n);
  if (w.standardize) {
    // Column v holds column_value[v] in every row adjacent to v.
    for (NodeId v = 0; v < n; ++v) {
      const double rms = column_value[v] * std::sqrt(degrees[v] / static_cast<double>(n));
      column_scale[v] = rms > 0.0 ? 1.0 / rms : 1.0;
    }
  }

  FeatureMatrix x(n, n);
  Eigen::VectorXi nnz(n);
  for (NodeId u = 0; u < n; ++u) nnz[u] = static_cast<int>(g.neighbors(u).size());
  x.reserve(nnz);
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v : g.neighbors(u)) x.insert(u, v) = column_value[v] * column_scale[v];
  }
  x.makeCompressed();
  return x;
}

FeatureMatrix feature_matrix(const Graph& g, const FeatureWeights& w) {
  return feature_matrix(g, degree_vector(g), coreness_vector(g), w);
}

SparseFeatureVector feature_row(const FeatureMatrix& x, NodeId u) {
  if (u < 0 || u >= x.rows()) throw Error(fmt::format("feature row {} out of range", u));
  return x.row(u).transpose();
}

SparseFeatureVector feature_vector(const Graph& g, NodeId u, const FeatureWeights& w) {
  if (!g.contains(u)) throw Error(fmt::format("feature_vector: invalid node {}", u));
  return feature_row(feature_matrix(g, w), u);
}

void write_feature_csv(const Graph& g, const FeatureMatrix& x, std::ostream& out) {
  out << "node,neighbour,value\n";
  for (Eigen::Index u = 0; u < x.outerSize(); ++u) {
    for (FeatureMatrix::InnerIterator it(x, u); it; ++it) {
      out << fmt::format("{},{},{}\n", g.label(static_cast<NodeId>(u)), g.label(static_cast<NodeId>(it.col())),
                         it.value());
    }
  }
}

}  // namespace eml
