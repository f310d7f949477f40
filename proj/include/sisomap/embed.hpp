#pragma once

#include "sisomap/eigen_solver.hpp"
#include "sisomap/geodesic.hpp"
#include "sisomap/knn.hpp"
#include "sisomap/types.hpp"

#include <vector>

namespace sisomap {

/// Low-dimensional coordinates from classical MDS.
struct Embedding {
  Coords coords;                ///< n x d, column means zero
  Eigen::VectorXd eigenvalues;  ///< d values, descending, clamped at zero
  /// Columns whose eigenvalue was not positive; they are zero-filled.
  std::vector<bool> clamped;

  Index size() const noexcept { return coords.rows(); }
  Index dim() const noexcept { return coords.cols(); }
  bool degenerate() const noexcept {
    for (bool c : clamped)
      if (c) return true;
    return false;
  }
};

/// B = -1/2 H S H with S the elementwise-squared distances and H = I - 11'/n.
ColMatrix<double> double_center_squared(const ColMatrix<double>& dist);

/// Embedding from the top-d eigenpairs of an already centered matrix B.
Embedding embedding_from_eigenpairs(const EigenPairs& pairs, Index d);

/// Classical MDS on the geodesic matrix: coords(:, j) = sqrt(lambda_j) v_j.
Embedding classical_mds(const GeodesicMatrix& G, Index d, EigenMethod method = EigenMethod::Auto);

/// 1 - rho^2, rho the Pearson correlation between geodesic and embedded
/// distances over all pairs i < j.
double residual_variance(const GeodesicMatrix& G, const Embedding& E);
double residual_variance(const GeodesicMatrix& G, const Eigen::Ref<const Coords>& coords);

struct DimDiagnostic {
  std::vector<double> residual_variances;  ///< index d-1 holds the value for dimension d
  Index chosen_d = 1;
  double threshold = 0.10;
};

/// Residual variance for d = 1..d_max from one eigendecomposition. chosen_d is
/// the last dimension whose drop in residual variance was at least `threshold`
/// (measured against the zero-dimensional baseline of 1); later dimensions are
/// considered noise.
DimDiagnostic estimate_dim(const GeodesicMatrix& G, Index d_max, double threshold = 0.10);

/// Neighbor graph, geodesics and embedding from one batch Isomap run.
struct IsomapResult {
  NeighborGraph graph;
  GeodesicMatrix geodesics;
  Embedding embedding;
};

IsomapResult isomap_fit(const DataMatrix& X, Index k, Index d,
                        EigenMethod method = EigenMethod::Auto);

/// knn_graph -> geodesic_matrix -> classical_mds.
Embedding isomap(const DataMatrix& X, Index k, Index d, EigenMethod method = EigenMethod::Auto);

}  // namespace sisomap
