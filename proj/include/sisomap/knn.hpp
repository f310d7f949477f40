#pragma once

#include "sisomap/types.hpp"

#include <span>
#include <vector>

namespace sisomap {

/// k nearest batch rows of a query, ascending by distance, ties by lower index.
struct NeighborQuery {
  std::vector<Index> indices;
  std::vector<double> distances;
};

/// Undirected weighted graph in compressed adjacency form. Edge lists of each
/// node are sorted by neighbor index.
class NeighborGraph {
 public:
  struct Edge {
    Index to;
    double length;
  };

  NeighborGraph() = default;

  /// Builds the union-symmetrized graph from per-node out-neighbor lists.
  /// Self-loops are dropped; a pair listed in both directions keeps the
  /// smaller length (both are the same Euclidean distance in practice).
  static NeighborGraph from_out_edges(const std::vector<NeighborQuery>& out, Index k);

  Index size() const noexcept { return static_cast<Index>(offsets_.size()) - 1; }
  Index k() const noexcept { return k_; }
  std::size_t edge_count() const noexcept { return edges_.size() / 2; }

  std::span<const Edge> neighbors(Index node) const {
    const auto b = static_cast<std::size_t>(offsets_[static_cast<std::size_t>(node)]);
    const auto e = static_cast<std::size_t>(offsets_[static_cast<std::size_t>(node) + 1]);
    return {edges_.data() + b, e - b};
  }

  Index degree(Index node) const { return static_cast<Index>(neighbors(node).size()); }

  /// Induced subgraph on `nodes` (renumbered 0..nodes.size()-1 in the given order).
  NeighborGraph subgraph(const std::vector<Index>& nodes) const;

 private:
  Index k_ = 0;
  std::vector<Index> offsets_{0};
  std::vector<Edge> edges_;
};

/// Exact k nearest rows of `batch` to `x` by Euclidean distance.
NeighborQuery knn_query(const DataMatrix& batch, const Eigen::Ref<const Eigen::RowVectorXd>& x,
                        Index k);

/// Out-neighbor lists before symmetrization: exactly k per node, self excluded.
std::vector<NeighborQuery> knn_lists(const DataMatrix& X, Index k);

/// Symmetrized (edge-union) k-nearest-neighbor graph.
NeighborGraph knn_graph(const DataMatrix& X, Index k);

}  // namespace sisomap
