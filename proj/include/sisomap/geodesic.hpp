#pragma once

#include "sisomap/knn.hpp"
#include "sisomap/types.hpp"

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace sisomap {

/// All-pairs shortest-path lengths over a neighbor graph, with cached means.
/// Stored dense; symmetric with zero diagonal.
struct GeodesicMatrix {
  ColMatrix<double> dist;
  Eigen::VectorXd row_means;
  double grand_mean = 0.0;

  Index size() const noexcept { return dist.rows(); }

  /// Wraps a precomputed distance matrix and fills the means.
  static GeodesicMatrix from_distances(ColMatrix<double> dist);
};

/// Single-source shortest paths (binary-heap Dijkstra). Unreachable nodes get +inf.
Eigen::VectorXd shortest_paths_from(const NeighborGraph& g, Index source);

/// Connected components, each sorted ascending, ordered by smallest member.
std::vector<std::vector<Index>> connected_components(const NeighborGraph& g);

/// Nodes of the largest component; ties go to the component with the smallest index.
std::vector<Index> largest_component(const NeighborGraph& g);

/// Dijkstra from every node. Throws DisconnectedGraph carrying the partition.
GeodesicMatrix geodesic_matrix(const NeighborGraph& g);

// Binary cache: 8-byte magic "SISOGEO1", uint64 n, then n*n row-major float64,
// all little-endian.
void write_geodesic_cache(std::ostream& out, const GeodesicMatrix& G);
GeodesicMatrix read_geodesic_cache(std::istream& in);
void write_geodesic_cache(const std::filesystem::path& path, const GeodesicMatrix& G);
GeodesicMatrix read_geodesic_cache(const std::filesystem::path& path);

}  // namespace sisomap
