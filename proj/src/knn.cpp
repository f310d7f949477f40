#include "sisomap/knn.hpp"

#include "sisomap/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace sisomap {

namespace {

using Candidate = std::pair<double, Index>;  // (squared distance, row)

// Keeps the k lexicographically smallest candidates, sorted.
NeighborQuery select_k(std::vector<Candidate>& cand, Index k) {
  const auto kk = static_cast<std::size_t>(k);
  if (cand.size() > kk) {
    std::nth_element(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(kk), cand.end());
    cand.resize(kk);
  }
  std::sort(cand.begin(), cand.end());
  NeighborQuery q;
  q.indices.reserve(cand.size());
  q.distances.reserve(cand.size());
  for (const auto& [d2, j] : cand) {
    q.indices.push_back(j);
    q.distances.push_back(std::sqrt(d2));
  }
  return q;
}

template <typename A, typename B>
double squared_distance(const A& a, const B& b) {
  return (a - b).squaredNorm();
}

// Above this dimension the pairwise scan goes through a matrix product
// ||a||^2 + ||b||^2 - 2 a.b, then re-ranks a guarded candidate set with exact
// distances so the result is identical to the direct scan.
constexpr Index kGemmDimThreshold = 32;
constexpr Index kBlockRows = 256;

std::vector<NeighborQuery> knn_lists_direct(const DataMatrix& X, Index k) {
  const Index n = X.rows();
  std::vector<NeighborQuery> out(static_cast<std::size_t>(n));
  parallel_for(0, n, [&](std::ptrdiff_t i) {
    std::vector<Candidate> cand;
    cand.reserve(static_cast<std::size_t>(n - 1));
    for (Index j = 0; j < n; ++j)
      if (j != i) cand.emplace_back(squared_distance(X.row(i), X.row(j)), j);
    out[static_cast<std::size_t>(i)] = select_k(cand, k);
  });
  return out;
}

std::vector<NeighborQuery> knn_lists_gemm(const DataMatrix& X, Index k) {
  const Index n = X.rows();
  const Index D = X.cols();
  const Eigen::VectorXd norms = X.rowwise().squaredNorm();
  const double max_norm = norms.maxCoeff();
  // Rounding bound for the expanded form; generous by a constant factor.
  const double eps = std::numeric_limits<double>::epsilon();

  std::vector<NeighborQuery> out(static_cast<std::size_t>(n));
  const Index blocks = (n + kBlockRows - 1) / kBlockRows;
  parallel_for(0, blocks, [&](std::ptrdiff_t b) {
    const Index r0 = b * kBlockRows;
    const Index rows = std::min(kBlockRows, n - r0);
    const Eigen::MatrixXd gram = X.middleRows(r0, rows) * X.transpose();
    std::vector<Candidate> approx;
    std::vector<Candidate> exact;
    approx.reserve(static_cast<std::size_t>(n));
    for (Index r = 0; r < rows; ++r) {
      const Index i = r0 + r;
      approx.clear();
      for (Index j = 0; j < n; ++j)
        if (j != i) approx.emplace_back(norms(i) + norms(j) - 2.0 * gram(r, j), j);
      std::nth_element(approx.begin(), approx.begin() + (k - 1), approx.end());
      const double kth = approx[static_cast<std::size_t>(k - 1)].first;
      const double slack = 8.0 * static_cast<double>(D + 2) * eps * (norms(i) + max_norm);
      exact.clear();
      for (const auto& [d2, j] : approx)
        if (d2 <= kth + 2.0 * slack) exact.emplace_back(squared_distance(X.row(i), X.row(j)), j);
      out[static_cast<std::size_t>(i)] = select_k(exact, k);
    }
  });
  return out;
}

}  // namespace

NeighborQuery knn_query(const DataMatrix& batch, const Eigen::Ref<const Eigen::RowVectorXd>& x,
                        Index k) {
  const Index n = batch.rows();
  if (x.size() != batch.cols())
    throw InvalidArgument("knn_query: sample has dimension " + std::to_string(x.size()) +
                          ", batch has " + std::to_string(batch.cols()));
  if (k < 1 || k > n) throw InvalidArgument("knn_query: k must be in [1, n]");
  std::vector<Candidate> cand;
  cand.reserve(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) cand.emplace_back(squared_distance(batch.row(j), x), j);
  return select_k(cand, k);
}

std::vector<NeighborQuery> knn_lists(const DataMatrix& X, Index k) {
  const Index n = X.rows();
  if (k < 1 || k >= n)
    throw InvalidArgument("knn_graph: k must be in [1, n), got k=" + std::to_string(k) +
                          " for n=" + std::to_string(n));
  require_finite(X, "knn_graph");
  return X.cols() > kGemmDimThreshold ? knn_lists_gemm(X, k) : knn_lists_direct(X, k);
}

NeighborGraph knn_graph(const DataMatrix& X, Index k) {
  return NeighborGraph::from_out_edges(knn_lists(X, k), k);
}

NeighborGraph NeighborGraph::from_out_edges(const std::vector<NeighborQuery>& out, Index k) {
  const auto n = out.size();
  std::vector<std::vector<Edge>> adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& q = out[i];
    for (std::size_t e = 0; e < q.indices.size(); ++e) {
      const auto j = static_cast<std::size_t>(q.indices[e]);
      if (j == i) continue;
      adj[i].push_back({static_cast<Index>(j), q.distances[e]});
      adj[j].push_back({static_cast<Index>(i), q.distances[e]});
    }
  }

  NeighborGraph g;
  g.k_ = k;
  g.offsets_.assign(1, 0);
  g.offsets_.reserve(n + 1);
  for (auto& list : adj) {
    std::sort(list.begin(), list.end(), [](const Edge& a, const Edge& b) {
      return a.to != b.to ? a.to < b.to : a.length < b.length;
    });
    const auto last = std::unique(list.begin(), list.end(),
                                  [](const Edge& a, const Edge& b) { return a.to == b.to; });
    g.edges_.insert(g.edges_.end(), list.begin(), last);
    g.offsets_.push_back(static_cast<Index>(g.edges_.size()));
  }
  return g;
}

NeighborGraph NeighborGraph::subgraph(const std::vector<Index>& nodes) const {
  std::vector<Index> remap(static_cast<std::size_t>(size()), -1);
  for (std::size_t i = 0; i < nodes.size(); ++i) remap[static_cast<std::size_t>(nodes[i])] = static_cast<Index>(i);

  NeighborGraph g;
  g.k_ = k_;
  g.offsets_.assign(1, 0);
  for (const Index v : nodes) {
    std::vector<Edge> list;
    for (const Edge& e : neighbors(v)) {
      const Index to = remap[static_cast<std::size_t>(e.to)];
      if (to >= 0) list.push_back({to, e.length});
    }
    std::sort(list.begin(), list.end(), [](const Edge& a, const Edge& b) { return a.to < b.to; });
    g.edges_.insert(g.edges_.end(), list.begin(), list.end());
    g.offsets_.push_back(static_cast<Index>(g.edges_.size()));
  }
  return g;
}

}  // namespace sisomap
