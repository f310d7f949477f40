#pragma once

#include "sisomap/embed.hpp"
#include "sisomap/geodesic.hpp"
#include "sisomap/knn.hpp"
#include "sisomap/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace sisomap {

/// Frozen batch manifold: samples, geodesics, embedding and the quantities the
/// streaming mapper reuses for every point. Immutable once built.
class BatchModel {
 public:
  /// Runs batch Isomap on X_b and caches everything the mapper needs.
  static BatchModel build(DataMatrix X_b, Index k, Index d);

  /// Assembles a model from an existing embedding of X_b.
  static BatchModel from_parts(DataMatrix X_b, GeodesicMatrix G_b, Embedding Y_b, Index k);

  const DataMatrix& samples() const noexcept { return X_; }
  const GeodesicMatrix& geodesics() const noexcept { return G_; }
  const Embedding& embedding() const noexcept { return Y_; }
  const Coords& coords() const noexcept { return Y_.coords; }
  Index k() const noexcept { return k_; }
  Index size() const noexcept { return X_.rows(); }
  Index input_dim() const noexcept { return X_.cols(); }
  Index dim() const noexcept { return Y_.coords.cols(); }

  /// Row means and grand mean of the elementwise-squared geodesic matrix.
  const Eigen::VectorXd& squared_row_means() const noexcept { return sq_row_means_; }
  double squared_grand_mean() const noexcept { return sq_grand_mean_; }

  /// Condition number of Y_b (square root of that of Y_b' Y_b).
  double condition() const noexcept { return condition_; }

  /// argmin_p ||Y_b p - c|| through the cached thin QR factors.
  Eigen::VectorXd solve_least_squares(const Eigen::Ref<const Eigen::VectorXd>& c) const;

  /// Column sums of Y_b, used by the recentering step.
  const Eigen::VectorXd& coord_sums() const noexcept { return coord_sums_; }

 private:
  BatchModel() = default;
  void prepare();

  DataMatrix X_;
  GeodesicMatrix G_;
  Embedding Y_;
  Index k_ = 0;

  Eigen::VectorXd sq_row_means_;
  double sq_grand_mean_ = 0.0;
  ColMatrix<double> q_;  ///< n x d, orthonormal columns
  ColMatrix<double> r_;  ///< d x d, upper triangular
  Eigen::VectorXd coord_sums_;
  double condition_ = 0.0;
};

/// g_i = min_j (kDist_j + G_b[kNN_j, i]): geodesic estimate from a new point
/// to every batch point, routed through its batch neighbors.
Eigen::VectorXd approx_geodesics(const BatchModel& model, const NeighborQuery& q);

/// Target inner products c = 1/2 (mean(g^2) - g^2 - mean(G_b^2) + rowmean(G_b^2)).
Eigen::VectorXd inner_product_targets(const BatchModel& model,
                                      const Eigen::Ref<const Eigen::VectorXd>& g);

struct PointMapping {
  Eigen::VectorXd y;       ///< embedded coordinates
  Eigen::VectorXd p;       ///< least-squares solution before recentering
  double residual = 0.0;   ///< ||Y_b p - c||
  double target_norm = 0.0;  ///< ||c||
};

/// S-Isomap for one sample: kNN in the batch, approximate geodesics, inner
/// product targets, least squares, and recentering against [Y_b; p].
PointMapping map_point_detail(const BatchModel& model,
                              const Eigen::Ref<const Eigen::RowVectorXd>& x);

Eigen::VectorXd map_point(const BatchModel& model, const Eigen::Ref<const Eigen::RowVectorXd>& x);

struct StreamMapping {
  Coords coords;                            ///< m x d, arrival order
  std::vector<std::int64_t> per_point_nanos;  ///< wall time of each map_point call
  std::vector<double> relative_residuals;   ///< ||Y_b p - c|| / ||c|| per point
};

/// Maps every row of X_s independently, in order, timing each call. Residual
/// diagnostics are gathered in a second, untimed pass when requested.
StreamMapping run_stream(const BatchModel& model, const DataMatrix& X_s,
                         bool with_residuals = true);

/// Same CSV convention as embeddings plus a trailing latency_ns column.
void write_stream_csv(std::ostream& out, const StreamMapping& mapping,
                      const std::string& comment = {});

}  // namespace sisomap
