#include "sisomap/embed.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sisomap {

ColMatrix<double> double_center_squared(const ColMatrix<double>& dist) {
  const Index n = dist.rows();
  ColMatrix<double> B = dist.array().square().matrix();
  const Eigen::VectorXd row_means = B.rowwise().mean();
  const double grand = row_means.mean();
  // S symmetric, so column means equal row means.
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) B(i, j) = -0.5 * (B(i, j) - row_means(i) - row_means(j) + grand);
  return B;
}

Embedding embedding_from_eigenpairs(const EigenPairs& pairs, Index d) {
  const Index n = pairs.vectors.rows();
  Embedding e;
  e.coords.resize(n, d);
  e.eigenvalues.resize(d);
  e.clamped.assign(static_cast<std::size_t>(d), false);
  for (Index j = 0; j < d; ++j) {
    const double lambda = pairs.values(j);
    if (lambda > 0.0) {
      e.eigenvalues(j) = lambda;
      e.coords.col(j) = std::sqrt(lambda) * pairs.vectors.col(j);
    } else {
      e.eigenvalues(j) = 0.0;
      e.coords.col(j).setZero();
      e.clamped[static_cast<std::size_t>(j)] = true;
    }
  }
  return e;
}

Embedding classical_mds(const GeodesicMatrix& G, Index d, EigenMethod method) {
  const Index n = G.size();
  if (d < 1 || d >= n)
    throw InvalidArgument("classical_mds: d must be in [1, n), got d=" + std::to_string(d) +
                          " for n=" + std::to_string(n));
  const ColMatrix<double> B = double_center_squared(G.dist);
  return embedding_from_eigenpairs(top_eigenpairs(B, d, method), d);
}

double residual_variance(const GeodesicMatrix& G, const Eigen::Ref<const Coords>& coords) {
  const Index n = G.size();
  if (coords.rows() != n)
    throw InvalidArgument("residual_variance: embedding has " + std::to_string(coords.rows()) +
                          " rows, geodesic matrix has " + std::to_string(n));
  if (n < 2) throw InvalidArgument("residual_variance: need at least two points");

  const RowMatrix<double> Y = coords;  // contiguous rows for the pair loop
  auto embedded = [&](Index i, Index j) { return (Y.row(i) - Y.row(j)).norm(); };

  const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  double sum_g = 0.0, sum_e = 0.0;
  for (Index j = 0; j < n; ++j)
    for (Index i = j + 1; i < n; ++i) {
      sum_g += G.dist(i, j);
      sum_e += embedded(i, j);
    }
  const double mean_g = sum_g / pairs, mean_e = sum_e / pairs;

  double sgg = 0.0, see = 0.0, sge = 0.0;
  for (Index j = 0; j < n; ++j)
    for (Index i = j + 1; i < n; ++i) {
      const double a = G.dist(i, j) - mean_g;
      const double b = embedded(i, j) - mean_e;
      sgg += a * a;
      see += b * b;
      sge += a * b;
    }
  if (!(sgg > 0.0) || !(see > 0.0))
    throw InvalidArgument("residual_variance: distance vector has zero variance");
  const double rho2 = (sge * sge) / (sgg * see);
  return std::clamp(1.0 - rho2, 0.0, 1.0);
}

double residual_variance(const GeodesicMatrix& G, const Embedding& E) {
  return residual_variance(G, E.coords);
}

DimDiagnostic estimate_dim(const GeodesicMatrix& G, Index d_max, double threshold) {
  const Index n = G.size();
  if (d_max < 1 || d_max >= n) throw InvalidArgument("estimate_dim: d_max must be in [1, n)");
  const ColMatrix<double> B = double_center_squared(G.dist);
  const Embedding full = embedding_from_eigenpairs(top_eigenpairs(B, d_max), d_max);

  DimDiagnostic diag;
  diag.threshold = threshold;
  double best = 1.0;
  for (Index d = 1; d <= d_max; ++d) {
    // Zero-filled columns leave distances unchanged; reuse the previous value
    // instead of failing on a constant embedding.
    double rv = best;
    if (!full.clamped[static_cast<std::size_t>(d - 1)]) rv = residual_variance(G, full.coords.leftCols(d));
    // Non-increasing by construction: a dimension can only be ignored, not hurt.
    rv = std::min(rv, best);
    diag.residual_variances.push_back(rv);
    best = rv;
  }

  diag.chosen_d = 1;
  double previous = 1.0;
  for (Index d = 1; d <= d_max; ++d) {
    const double rv = diag.residual_variances[static_cast<std::size_t>(d - 1)];
    if (previous - rv < threshold) break;
    diag.chosen_d = d;
    previous = rv;
  }
  return diag;
}

IsomapResult isomap_fit(const DataMatrix& X, Index k, Index d, EigenMethod method) {
  if (d < 1 || d >= X.rows()) throw InvalidArgument("isomap: d must be in [1, n)");
  IsomapResult r;
  r.graph = knn_graph(X, k);
  r.geodesics = geodesic_matrix(r.graph);
  r.embedding = classical_mds(r.geodesics, d, method);
  return r;
}

Embedding isomap(const DataMatrix& X, Index k, Index d, EigenMethod method) {
  return isomap_fit(X, k, d, method).embedding;
}

}  // namespace sisomap
