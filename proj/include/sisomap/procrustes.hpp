#pragma once

#include "sisomap/types.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <string>

namespace sisomap {

/// Similarity transform taking B onto A (column-vector convention,
/// a ~ scale * rotation * b + translation) and the residual it leaves.
template <typename Scalar>
struct AlignmentResult {
  ColMatrix<Scalar> rotation;   ///< d x d orthogonal, reflections allowed
  Scalar scale = 0;
  Vector<Scalar> translation;
  /// ||s R B + t - A||_F^2 / ||A - mean(A)||_F^2, in [0, 1].
  Scalar error = 0;
  /// ||s R B + t - A||_F, the unnormalized minimum.
  Scalar frobenius = 0;
};

/// Optimal similarity alignment of B onto A (rows are corresponding points).
///
/// With centered A^, B^ and the SVD B^' A^ = U S V', the optimal orthogonal map
/// on row vectors is Q = U V', the scale tr(S) / ||B^||^2, and the normalized
/// residual 1 - tr(S)^2 / (||A^||^2 ||B^||^2), which is symmetric in A and B.
template <typename DerivedA, typename DerivedB>
AlignmentResult<typename DerivedA::Scalar> procrustes_align(const Eigen::MatrixBase<DerivedA>& A,
                                                            const Eigen::MatrixBase<DerivedB>& B) {
  using Scalar = typename DerivedA::Scalar;
  using Mat = ColMatrix<Scalar>;
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw InvalidArgument("procrustes: shape mismatch " + std::to_string(A.rows()) + "x" +
                          std::to_string(A.cols()) + " vs " + std::to_string(B.rows()) + "x" +
                          std::to_string(B.cols()));
  if (A.rows() < A.cols()) throw InvalidArgument("procrustes: need at least d points");
  require_finite(A, "procrustes");
  require_finite(B, "procrustes");

  const Vector<Scalar> mean_a = A.colwise().mean().transpose();
  const Vector<Scalar> mean_b = B.colwise().mean().transpose();
  const Mat a = A.rowwise() - mean_a.transpose();
  const Mat b = B.rowwise() - mean_b.transpose();
  const Scalar norm_a = a.squaredNorm();
  const Scalar norm_b = b.squaredNorm();
  if (!(norm_a > Scalar(0))) throw InvalidArgument("procrustes: first point set is degenerate");
  if (!(norm_b > Scalar(0))) throw InvalidArgument("procrustes: second point set is degenerate");

  AlignmentResult<Scalar> r;
  if (a == b) {
    // Identical centered sets: the exact answer, without SVD rounding.
    r.rotation = Mat::Identity(A.cols(), A.cols());
    r.scale = Scalar(1);
    r.translation = mean_a - mean_b;
    r.frobenius = Scalar(0);
    r.error = Scalar(0);
    return r;
  }

  Eigen::JacobiSVD<Mat> svd(b.transpose() * a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat q = svd.matrixU() * svd.matrixV().transpose();  // rows: b_i' q ~ a_i'
  const Scalar trace = svd.singularValues().sum();

  r.rotation = q.transpose();
  r.scale = trace / norm_b;
  r.translation = mean_a - r.scale * r.rotation * mean_b;
  const Scalar residual = (r.scale * b * q - a).squaredNorm();
  r.frobenius = std::sqrt(residual);
  r.error = std::clamp(residual / norm_a, Scalar(0), Scalar(1));
  return r;
}

/// Normalized Procrustes disparity between ground truth and an embedding.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar direct_error(const Eigen::MatrixBase<DerivedA>& truth,
                                       const Eigen::MatrixBase<DerivedB>& embedded) {
  return procrustes_align(truth, embedded).error;
}

struct ReferenceSampleOptions {
  Index reference_size = 100;  ///< |F|
  Index sample_size = 100;     ///< |R1| = |R2|
  Index k = 10;
  Index d = 2;
  Seed seed = 0;
  /// Use the same subset for R1 and R2 (a consistency check; the error is then 0).
  bool shared_sample = false;
};

/// Reference-sample error: Procrustes disparity between the embeddings of a
/// reference set F learned from F u R1 and from F u R2, where F, R1, R2 are
/// disjoint seeded subsets of X. F occupies the first rows of both runs.
/// A disconnected neighbor graph in either run is reported as DisconnectedGraph
/// whose message names the run.
double reference_sample_error(const DataMatrix& X, const ReferenceSampleOptions& options);

}  // namespace sisomap
