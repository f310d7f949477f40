#include "sisomap/knn.hpp"
#include "sisomap/random.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

using namespace sisomap;

namespace {

DataMatrix random_points(Index n, Index dim, Seed seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal;
  DataMatrix X(n, dim);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < dim; ++j) X(i, j) = normal(rng);
  return X;
}

// Full stable argsort by (distance, index).
std::vector<Index> argsort_oracle(const DataMatrix& X, const Eigen::RowVectorXd& x) {
  std::vector<Index> order(static_cast<std::size_t>(X.rows()));
  std::iota(order.begin(), order.end(), Index{0});
  std::vector<double> d(order.size());
  for (Index i = 0; i < X.rows(); ++i) d[static_cast<std::size_t>(i)] = (X.row(i) - x).norm();
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return d[static_cast<std::size_t>(a)] < d[static_cast<std::size_t>(b)];
  });
  return order;
}

}  // namespace

TEST_CASE("collinear points 0, 1, 3") {
  DataMatrix X(3, 1);
  X << 0.0, 1.0, 3.0;
  const auto g = knn_graph(X, 1);
  // 0 -> 1, 1 -> 0, 2 -> 1: union gives edges {0,1} and {1,2}.
  CHECK(g.edge_count() == 2);
  CHECK(g.degree(0) == 1);
  CHECK(g.degree(1) == 2);
  CHECK(g.degree(2) == 1);
  CHECK(g.neighbors(1)[0].to == 0);
  CHECK(g.neighbors(1)[1].to == 2);
  CHECK(g.neighbors(1)[1].length == 2.0);

  const auto q = knn_query(X, Eigen::RowVectorXd::Constant(1, 2.5), 2);
  CHECK(q.indices == std::vector<Index>{2, 1});
  CHECK(q.distances[0] == doctest::Approx(0.5));
  CHECK(q.distances[1] == doctest::Approx(1.5));
}

TEST_CASE("knn_query matches a full argsort") {
  for (Index dim : {3, 40}) {
    const DataMatrix X = random_points(500, dim, 11 + static_cast<Seed>(dim));
    const DataMatrix Q = random_points(20, dim, 5);
    for (Index i = 0; i < Q.rows(); ++i) {
      const auto order = argsort_oracle(X, Q.row(i));
      const auto q = knn_query(X, Q.row(i), 10);
      REQUIRE(q.indices.size() == 10);
      for (std::size_t j = 0; j < 10; ++j) {
        CHECK(q.indices[j] == order[j]);
        CHECK(q.distances[j] == doctest::Approx((X.row(order[j]) - Q.row(i)).norm()));
      }
    }
  }
}

TEST_CASE("knn_lists match per-row argsort for low and high dimension") {
  for (Index dim : {2, 64}) {
    const DataMatrix X = random_points(300, dim, 3);
    const auto lists = knn_lists(X, 7);
    for (Index i = 0; i < X.rows(); ++i) {
      auto order = argsort_oracle(X, X.row(i));
      order.erase(std::find(order.begin(), order.end(), i));
      const auto& l = lists[static_cast<std::size_t>(i)];
      REQUIRE(l.indices.size() == 7);
      for (std::size_t j = 0; j < 7; ++j) CHECK(l.indices[j] == order[j]);
    }
  }
}

TEST_CASE("ties go to the lower index") {
  DataMatrix X(5, 1);
  X << 0.0, 1.0, -1.0, 2.0, -2.0;
  const auto q = knn_query(X, Eigen::RowVectorXd::Zero(1), 3);
  CHECK(q.indices == std::vector<Index>{0, 1, 2});
  const auto q2 = knn_query(X, Eigen::RowVectorXd::Zero(1), 4);
  CHECK(q2.indices == std::vector<Index>{0, 1, 2, 3});
}

TEST_CASE("duplicate rows are neighbors at distance zero") {
  DataMatrix X(4, 2);
  X << 0, 0, 0, 0, 5, 5, 9, 9;
  const auto lists = knn_lists(X, 1);
  CHECK(lists[0].indices[0] == 1);
  CHECK(lists[0].distances[0] == 0.0);
  CHECK(lists[1].indices[0] == 0);
}

TEST_CASE("graph invariants") {
  const DataMatrix X = random_points(200, 3, 21);
  const Index k = 6;
  const auto g = knn_graph(X, k);
  const auto lists = knn_lists(X, k);
  std::size_t halfedges = 0;
  for (Index i = 0; i < g.size(); ++i) {
    CHECK(g.degree(i) >= k);
    const auto nb = g.neighbors(i);
    halfedges += nb.size();
    for (std::size_t e = 0; e < nb.size(); ++e) {
      CHECK(nb[e].to != i);
      if (e > 0) CHECK(nb[e - 1].to < nb[e].to);
      // symmetric with equal lengths
      const auto back = g.neighbors(nb[e].to);
      const auto it = std::find_if(back.begin(), back.end(),
                                   [&](const NeighborGraph::Edge& b) { return b.to == i; });
      REQUIRE(it != back.end());
      CHECK(it->length == nb[e].length);
    }
    // every out-neighbor survives symmetrization
    for (Index j : lists[static_cast<std::size_t>(i)].indices)
      CHECK(std::any_of(nb.begin(), nb.end(), [&](const NeighborGraph::Edge& e) { return e.to == j; }));
  }
  CHECK(halfedges == 2 * g.edge_count());
}

TEST_CASE("knn preconditions") {
  const DataMatrix X = random_points(5, 2, 1);
  CHECK_THROWS_AS(knn_graph(X, 0), InvalidArgument);
  CHECK_THROWS_AS(knn_graph(X, 5), InvalidArgument);
  CHECK_THROWS_AS(knn_query(X, Eigen::RowVectorXd::Zero(3), 2), InvalidArgument);
  DataMatrix bad = X;
  bad(2, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(knn_graph(bad, 2), InvalidArgument);
}
