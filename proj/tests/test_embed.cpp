#include "sisomap/data.hpp"
#include "sisomap/eigen_solver.hpp"
#include "sisomap/embed.hpp"
#include "sisomap/procrustes.hpp"
#include "sisomap/random.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <random>

using namespace sisomap;

namespace {

ColMatrix<double> euclidean(const Eigen::Ref<const ColMatrix<double>>& P) {
  const Index n = P.rows();
  ColMatrix<double> D(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) D(i, j) = (P.row(i) - P.row(j)).norm();
  return D;
}

ColMatrix<double> random_symmetric(Index n, Seed seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal;
  ColMatrix<double> A(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) A(i, j) = normal(rng);
  return (A + A.transpose()) / 2.0;
}

}  // namespace

TEST_CASE("two points embed at -1 and +1") {
  ColMatrix<double> D(2, 2);
  D << 0, 2, 2, 0;
  const auto E = classical_mds(GeodesicMatrix::from_distances(D), 1);
  CHECK(std::abs(E.coords(0, 0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(E.coords(1, 0) == doctest::Approx(-E.coords(0, 0)).epsilon(1e-12));
  CHECK(E.eigenvalues(0) == doctest::Approx(2.0));
}

TEST_CASE("collinear 0, 1, 2") {
  ColMatrix<double> P(3, 1);
  P << 0, 1, 2;
  const auto E = classical_mds(GeodesicMatrix::from_distances(euclidean(P)), 1);
  // sign rule: the largest-magnitude entry is positive; the two ends tie in
  // magnitude, so compare up to sign
  CHECK(std::abs(E.coords(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(E.coords(1, 0)) < 1e-12);
  CHECK(E.coords(0, 0) == doctest::Approx(-E.coords(2, 0)));
  CHECK(E.eigenvalues(0) == doctest::Approx(2.0));
}

TEST_CASE("unit square recovered up to rigid motion") {
  ColMatrix<double> P(4, 2);
  P << 0, 0, 1, 0, 1, 1, 0, 1;
  const auto E = classical_mds(GeodesicMatrix::from_distances(euclidean(P)), 2);
  CHECK(euclidean(E.coords).isApprox(euclidean(P), 1e-12));
  CHECK(E.eigenvalues(0) == doctest::Approx(1.0));
  CHECK(E.eigenvalues(1) == doctest::Approx(1.0));
  CHECK(E.coords.colwise().sum().norm() < 1e-12);
}

TEST_CASE("double centering matches -1/2 H S H") {
  ColMatrix<double> P = ColMatrix<double>::Random(12, 3);
  const ColMatrix<double> D = euclidean(P);
  const Index n = 12;
  const ColMatrix<double> H =
      ColMatrix<double>::Identity(n, n) - ColMatrix<double>::Constant(n, n, 1.0 / n);
  const ColMatrix<double> S = D.array().square().matrix();
  const ColMatrix<double> expected = -0.5 * H * S * H;
  CHECK(double_center_squared(D).isApprox(expected, 1e-12));
  // For Euclidean input B is the Gram matrix of the centered points.
  const ColMatrix<double> Pc = P.rowwise() - P.colwise().mean();
  CHECK(double_center_squared(D).isApprox(Pc * Pc.transpose(), 1e-12));
}

TEST_CASE("Lanczos eigenvalues agree with the dense solver") {
  for (Index n : {30, 90, 200}) {
    const ColMatrix<double> A = random_symmetric(n, static_cast<Seed>(n));
    const auto dense = top_eigenpairs(A, 5, EigenMethod::Dense);
    const auto lanczos = top_eigenpairs(A, 5, EigenMethod::Lanczos);
    Eigen::SelfAdjointEigenSolver<ColMatrix<double>> ref(A);
    for (Index j = 0; j < 5; ++j) {
      const double expect = ref.eigenvalues()(n - 1 - j);
      CHECK(dense.values(j) == doctest::Approx(expect).epsilon(1e-8));
      CHECK(lanczos.values(j) == doctest::Approx(expect).epsilon(1e-8));
      CHECK((A * lanczos.vectors.col(j) - lanczos.values(j) * lanczos.vectors.col(j)).norm() <
            1e-7 * A.norm());
      Index arg;
      lanczos.vectors.col(j).cwiseAbs().maxCoeff(&arg);
      CHECK(lanczos.vectors(arg, j) > 0.0);
    }
  }
}

TEST_CASE("classical_mds eigenvalues: Lanczos vs dense on geodesics") {
  const auto roll = gen_swiss_roll(200, 4);
  const auto fit = isomap_fit(roll.points, 10, 3, EigenMethod::Dense);
  const auto lan = classical_mds(fit.geodesics, 3, EigenMethod::Lanczos);
  for (Index j = 0; j < 3; ++j)
    CHECK(lan.eigenvalues(j) == doctest::Approx(fit.embedding.eigenvalues(j)).epsilon(1e-8));
}

TEST_CASE("negative spectrum is clamped and flagged") {
  EigenPairs pairs;
  pairs.values = Eigen::Vector3d(4.0, 0.0, -1.0);
  pairs.vectors = ColMatrix<double>::Identity(5, 3);
  const auto E = embedding_from_eigenpairs(pairs, 3);
  CHECK_FALSE(E.clamped[0]);
  CHECK(E.clamped[1]);
  CHECK(E.clamped[2]);
  CHECK(E.degenerate());
  CHECK(E.eigenvalues(2) == 0.0);
  CHECK(E.coords(0, 0) == doctest::Approx(2.0));
  CHECK(E.coords.col(2).isZero());
}

TEST_CASE("embedding norm is bounded by the Gram trace") {
  const auto roll = gen_swiss_roll(150, 9);
  const auto fit = isomap_fit(roll.points, 8, 2);
  const ColMatrix<double> B = double_center_squared(fit.geodesics.dist);
  CHECK(fit.embedding.coords.squaredNorm() <= B.trace() * (1 + 1e-12));
  CHECK(fit.embedding.coords.squaredNorm() ==
        doctest::Approx(fit.embedding.eigenvalues.sum()).epsilon(1e-10));
}

TEST_CASE("isomap is invariant to rigid motions of the input") {
  const auto roll = gen_swiss_roll(300, 12);
  const Eigen::Matrix3d R =
      Eigen::AngleAxisd(0.7, Eigen::Vector3d(1, 2, 3).normalized()).toRotationMatrix();
  DataMatrix moved = roll.points * R.transpose();
  moved.rowwise() += Eigen::RowVector3d(5, -3, 2);
  const auto a = isomap(roll.points, 10, 2);
  const auto b = isomap(moved, 10, 2);
  CHECK(procrustes_align(a.coords, b.coords).error < 1e-10);
}

TEST_CASE("residual variance") {
  ColMatrix<double> P = ColMatrix<double>::Random(30, 2);
  const auto G = GeodesicMatrix::from_distances(euclidean(P));
  const auto E = classical_mds(G, 2);
  CHECK(residual_variance(G, E) < 1e-12);
  const auto E1 = classical_mds(G, 1);
  const double rv1 = residual_variance(G, E1);
  CHECK(rv1 > 0.0);
  CHECK(rv1 <= 1.0);

  const auto dim = estimate_dim(G, 4);
  CHECK(dim.residual_variances.size() == 4);
  CHECK(dim.chosen_d == 2);
  for (std::size_t i = 1; i < dim.residual_variances.size(); ++i)
    CHECK(dim.residual_variances[i] <= dim.residual_variances[i - 1]);
}

TEST_CASE("flat plane in ten dimensions") {
  Rng rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ColMatrix<double> Y(80, 2);
  for (Index i = 0; i < 80; ++i) Y.row(i) << u(rng), u(rng);
  const ColMatrix<double> basis =
      Eigen::HouseholderQR<ColMatrix<double>>(ColMatrix<double>::Random(10, 2)).householderQ() *
      ColMatrix<double>::Identity(10, 2);
  const DataMatrix X = Y * basis.transpose();
  const auto E = isomap(X, 79, 2);
  CHECK(procrustes_align(Y, E.coords).error < 1e-10);
}

TEST_CASE("mds preconditions") {
  ColMatrix<double> D(3, 3);
  D.setZero();
  CHECK_THROWS_AS(classical_mds(GeodesicMatrix::from_distances(D), 0), InvalidArgument);
  CHECK_THROWS_AS(classical_mds(GeodesicMatrix::from_distances(D), 3), InvalidArgument);
}
