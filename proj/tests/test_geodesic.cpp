#include "sisomap/geodesic.hpp"
#include "sisomap/random.hpp"

#include <doctest.h>

#include <limits>
#include <random>
#include <sstream>
#include <string>

using namespace sisomap;

namespace {

// Adjacency from out-lists with integer weights so that every path sum is exact.
NeighborGraph integer_graph(Index n, Index out_degree, Seed seed) {
  Rng rng(seed);
  std::uniform_int_distribution<int> weight(1, 20);
  std::uniform_int_distribution<Index> node(0, n - 1);
  std::vector<NeighborQuery> out(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    auto& q = out[static_cast<std::size_t>(i)];
    // a chain keeps the graph connected
    if (i + 1 < n) {
      q.indices.push_back(i + 1);
      q.distances.push_back(weight(rng));
    }
    for (Index e = 0; e < out_degree; ++e) {
      const Index j = node(rng);
      if (j == i) continue;
      q.indices.push_back(j);
      q.distances.push_back(weight(rng));
    }
  }
  return NeighborGraph::from_out_edges(out, out_degree);
}

ColMatrix<double> floyd_warshall(const NeighborGraph& g) {
  const Index n = g.size();
  ColMatrix<double> d =
      ColMatrix<double>::Constant(n, n, std::numeric_limits<double>::infinity());
  for (Index i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (const auto& e : g.neighbors(i)) d(i, e.to) = std::min(d(i, e.to), e.length);
  }
  for (Index m = 0; m < n; ++m)
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) d(i, j) = std::min(d(i, j), d(i, m) + d(m, j));
  return d;
}

}  // namespace

TEST_CASE("geodesic_matrix equals Floyd-Warshall exactly") {
  for (Seed s = 0; s < 10; ++s) {
    const Index n = 10 + static_cast<Index>(s) * 4;
    const auto g = integer_graph(n, 2, s);
    const auto G = geodesic_matrix(g);
    CHECK(G.dist == floyd_warshall(g));
  }
}

TEST_CASE("geodesic matrix invariants") {
  const auto g = integer_graph(40, 3, 77);
  const auto G = geodesic_matrix(g);
  CHECK(G.dist == G.dist.transpose());
  CHECK(G.dist.diagonal().isZero());
  CHECK(G.row_means.isApprox(G.dist.rowwise().mean()));
  CHECK(G.grand_mean == doctest::Approx(G.dist.mean()));
  for (Index i = 0; i < 40; ++i)
    for (Index j = 0; j < 40; ++j)
      for (Index m = 0; m < 40; ++m) CHECK_LE(G.dist(i, j), G.dist(i, m) + G.dist(m, j));
}

TEST_CASE("disconnected graph reports its components") {
  // {0,1}, {2,3,4}, {5}
  std::vector<NeighborQuery> out(6);
  out[0] = {{1}, {1.0}};
  out[2] = {{3, 4}, {1.0, 2.0}};
  const auto g = NeighborGraph::from_out_edges(out, 1);
  const auto comps = connected_components(g);
  REQUIRE(comps.size() == 3);
  CHECK(comps[0] == std::vector<Index>{0, 1});
  CHECK(comps[1] == std::vector<Index>{2, 3, 4});
  CHECK(comps[2] == std::vector<Index>{5});
  CHECK(largest_component(g) == std::vector<Index>{2, 3, 4});
  try {
    geodesic_matrix(g);
    FAIL("expected DisconnectedGraph");
  } catch (const DisconnectedGraph& e) {
    CHECK(e.components() == comps);
    CHECK(std::string(e.what()).find("3 components of sizes 2, 3, 1") != std::string::npos);
  }

  const auto d = shortest_paths_from(g, 2);
  CHECK(d(4) == 2.0);
  CHECK(std::isinf(d(0)));
}

TEST_CASE("largest component tie goes to the first") {
  std::vector<NeighborQuery> out(4);
  out[0] = {{1}, {1.0}};
  out[2] = {{3}, {1.0}};
  const auto g = NeighborGraph::from_out_edges(out, 1);
  CHECK(largest_component(g) == std::vector<Index>{0, 1});
}

TEST_CASE("subgraph keeps induced edges") {
  const auto g = integer_graph(20, 3, 5);
  const std::vector<Index> nodes{4, 9, 10, 11, 3};
  const auto s = g.subgraph(nodes);
  for (Index a = 0; a < 5; ++a)
    for (const auto& e : s.neighbors(a)) {
      const auto orig = g.neighbors(nodes[static_cast<std::size_t>(a)]);
      CHECK(std::any_of(orig.begin(), orig.end(), [&](const NeighborGraph::Edge& o) {
        return o.to == nodes[static_cast<std::size_t>(e.to)] && o.length == e.length;
      }));
    }
}

TEST_CASE("geodesic cache round trip") {
  const auto G = geodesic_matrix(integer_graph(15, 2, 3));
  std::stringstream s;
  write_geodesic_cache(s, G);
  const std::string bytes = s.str();
  CHECK(bytes.substr(0, 8) == "SISOGEO1");
  CHECK(bytes.size() == 16 + 15 * 15 * 8);
  const auto back = read_geodesic_cache(s);
  CHECK(back.dist == G.dist);
  CHECK(back.grand_mean == G.grand_mean);

  std::istringstream bad("NOTACACHE_______");
  CHECK_THROWS_AS(read_geodesic_cache(bad), DataError);
  std::istringstream truncated(bytes.substr(0, 100));
  CHECK_THROWS_AS(read_geodesic_cache(truncated), DataError);
}
