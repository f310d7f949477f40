#include "sisomap/eigen_solver.hpp"

#include "sisomap/random.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

namespace sisomap {

namespace {

constexpr Index kDenseCutoff = 400;
constexpr double kResidualTol = 1e-12;

void fix_signs(ColMatrix<double>& vectors) {
  for (Index j = 0; j < vectors.cols(); ++j) {
    Index arg = 0;
    vectors.col(j).cwiseAbs().maxCoeff(&arg);
    if (vectors(arg, j) < 0.0) vectors.col(j) = -vectors.col(j);
  }
}

EigenPairs dense_top(const ColMatrix<double>& A, Index count) {
  Eigen::SelfAdjointEigenSolver<ColMatrix<double>> solver(A);
  if (solver.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  EigenPairs out;
  // Eigen returns ascending order.
  out.values = solver.eigenvalues().tail(count).reverse();
  out.vectors = solver.eigenvectors().rightCols(count).rowwise().reverse();
  return out;
}

// Lanczos with full reorthogonalization, growing the basis until the top
// `count` Ritz pairs have residual |beta_m * s_m| <= tol * |lambda|_max.
// Returns nothing if the basis reaches its cap first.
std::optional<EigenPairs> lanczos_top(const ColMatrix<double>& A, Index count, Index max_basis) {
  const Index n = A.rows();
  max_basis = std::min(max_basis, n);
  ColMatrix<double> V(n, max_basis);
  Eigen::VectorXd alpha(max_basis), beta(max_basis);

  Rng rng(0x1a2c3e5ULL);
  std::normal_distribution<double> gauss;
  auto random_unit = [&](Index cols_to_avoid) {
    Eigen::VectorXd v(n);
    for (Index i = 0; i < n; ++i) v(i) = gauss(rng);
    for (int pass = 0; pass < 2 && cols_to_avoid > 0; ++pass)
      v -= V.leftCols(cols_to_avoid) * (V.leftCols(cols_to_avoid).transpose() * v);
    return Eigen::VectorXd(v / v.norm());
  };

  V.col(0) = random_unit(0);
  Eigen::VectorXd w(n);
  const Index first_check = std::min(max_basis, std::max<Index>(2 * count + 10, 30));
  Index next_check = first_check;

  for (Index j = 0; j < max_basis; ++j) {
    w.noalias() = A.selfadjointView<Eigen::Lower>() * V.col(j);
    alpha(j) = V.col(j).dot(w);
    // Two Gram-Schmidt passes against the whole basis.
    for (int pass = 0; pass < 2; ++pass)
      w -= V.leftCols(j + 1) * (V.leftCols(j + 1).transpose() * w);
    beta(j) = w.norm();

    const Index m = j + 1;
    const bool exhausted = m == max_basis;
    if (m >= count && (m == next_check || exhausted || beta(j) == 0.0)) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
      tri.computeFromTridiagonal(alpha.head(m), beta.head(m - 1), Eigen::ComputeEigenvectors);
      const Eigen::VectorXd& theta = tri.eigenvalues();
      const double scale = std::max(std::abs(theta(0)), std::abs(theta(m - 1)));
      bool converged = true;
      for (Index i = 0; i < count; ++i) {
        const double residual = std::abs(beta(j) * tri.eigenvectors()(m - 1, m - 1 - i));
        if (residual > kResidualTol * scale) converged = false;
      }
      // A full basis spans the space, so its Ritz pairs are exact.
      if (converged || m == n) {
        EigenPairs out;
        out.values = theta.tail(count).reverse();
        out.vectors = V.leftCols(m) * tri.eigenvectors().rightCols(count).rowwise().reverse();
        for (Index c = 0; c < count; ++c) out.vectors.col(c).normalize();
        return out;
      }
      if (exhausted) return std::nullopt;
      next_check = std::min(max_basis, m + std::max<Index>(10, m / 4));
    }

    if (j + 1 < max_basis) {
      if (beta(j) <= 1e-14 * std::max(1.0, std::abs(alpha(j)))) {
        // Invariant subspace: continue from a fresh direction.
        beta(j) = 0.0;
        V.col(j + 1) = random_unit(j + 1);
      } else {
        V.col(j + 1) = w / beta(j);
      }
    }
  }
  return std::nullopt;
}

}  // namespace

EigenPairs top_eigenpairs(const ColMatrix<double>& A, Index count, EigenMethod method) {
  const Index n = A.rows();
  if (A.cols() != n) throw InvalidArgument("top_eigenpairs: matrix must be square");
  if (count < 1 || count > n)
    throw InvalidArgument("top_eigenpairs: count must be in [1, n], got " + std::to_string(count));

  EigenPairs out;
  if (method == EigenMethod::Dense || (method == EigenMethod::Auto && n <= kDenseCutoff)) {
    out = dense_top(A, count);
  } else {
    const Index cap = method == EigenMethod::Lanczos ? n : std::min<Index>(n, 600);
    auto found = lanczos_top(A, count, cap);
    if (found) {
      out = std::move(*found);
    } else if (method == EigenMethod::Auto) {
      out = dense_top(A, count);
    } else {
      throw NumericalError("Lanczos iteration did not converge");
    }
  }
  fix_signs(out.vectors);
  return out;
}

}  // namespace sisomap
