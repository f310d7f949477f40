#include "sisomap/geodesic.hpp"

#include "sisomap/parallel.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <string>

namespace sisomap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct HeapEntry {
  double d;
  Index node;
  bool operator>(const HeapEntry& o) const { return d > o.d; }
};

using MinHeap = std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<>>;

template <typename Out>
void dijkstra(const NeighborGraph& g, Index source, Out&& dist, MinHeap& heap) {
  const Index n = g.size();
  for (Index i = 0; i < n; ++i) dist[i] = kInf;
  dist[source] = 0.0;
  heap.push({0.0, source});
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;  // stale entry
    for (const auto& e : g.neighbors(u)) {
      const double nd = d + e.length;
      if (nd < dist[e.to]) {
        dist[e.to] = nd;
        heap.push({nd, e.to});
      }
    }
  }
}

}  // namespace

GeodesicMatrix GeodesicMatrix::from_distances(ColMatrix<double> dist) {
  if (dist.rows() != dist.cols()) throw InvalidArgument("GeodesicMatrix: matrix must be square");
  GeodesicMatrix G;
  G.dist = std::move(dist);
  G.row_means = G.dist.rowwise().mean();
  G.grand_mean = G.dist.size() ? G.dist.mean() : 0.0;
  return G;
}

Eigen::VectorXd shortest_paths_from(const NeighborGraph& g, Index source) {
  if (source < 0 || source >= g.size()) throw InvalidArgument("shortest_paths_from: bad source");
  Eigen::VectorXd dist(g.size());
  MinHeap heap;
  dijkstra(g, source, dist.data(), heap);
  return dist;
}

std::vector<std::vector<Index>> connected_components(const NeighborGraph& g) {
  const Index n = g.size();
  std::vector<Index> label(static_cast<std::size_t>(n), -1);
  std::vector<std::vector<Index>> comps;
  std::vector<Index> stack;
  for (Index s = 0; s < n; ++s) {
    if (label[static_cast<std::size_t>(s)] >= 0) continue;
    const auto id = static_cast<Index>(comps.size());
    comps.emplace_back();
    label[static_cast<std::size_t>(s)] = id;
    stack.push_back(s);
    while (!stack.empty()) {
      const Index u = stack.back();
      stack.pop_back();
      comps.back().push_back(u);
      for (const auto& e : g.neighbors(u)) {
        auto& l = label[static_cast<std::size_t>(e.to)];
        if (l < 0) {
          l = id;
          stack.push_back(e.to);
        }
      }
    }
    std::sort(comps.back().begin(), comps.back().end());
  }
  return comps;
}

std::vector<Index> largest_component(const NeighborGraph& g) {
  auto comps = connected_components(g);
  if (comps.empty()) return {};
  // Components are discovered in order of their smallest member, so the first
  // maximum is the tie-break winner.
  std::size_t best = 0;
  for (std::size_t c = 1; c < comps.size(); ++c)
    if (comps[c].size() > comps[best].size()) best = c;
  return std::move(comps[best]);
}

GeodesicMatrix geodesic_matrix(const NeighborGraph& g) {
  const Index n = g.size();
  if (n == 0) return GeodesicMatrix::from_distances(ColMatrix<double>(0, 0));
  auto comps = connected_components(g);
  if (comps.size() > 1) {
    std::string sizes;
    for (const auto& c : comps) sizes += (sizes.empty() ? "" : ", ") + std::to_string(c.size());
    const std::string message = "neighbor graph is disconnected: " +
                                std::to_string(comps.size()) + " components of sizes " + sizes;
    throw DisconnectedGraph(message, std::move(comps));
  }

  ColMatrix<double> dist(n, n);
  // One column per source; columns are contiguous and disjoint across workers.
  parallel_for(0, n, [&](std::ptrdiff_t s) {
    thread_local MinHeap heap;
    dijkstra(g, s, dist.col(s).data(), heap);
  });
  // Floating-point path sums can differ in the last bit between the two
  // directions; store the exact symmetric part.
  for (Index j = 0; j < n; ++j)
    for (Index i = j + 1; i < n; ++i) {
      const double v = std::min(dist(i, j), dist(j, i));
      dist(i, j) = v;
      dist(j, i) = v;
    }
  return GeodesicMatrix::from_distances(std::move(dist));
}

// ---------------------------------------------------------------------------
// Cache

namespace {

constexpr std::array<char, 8> kMagic{'S', 'I', 'S', 'O', 'G', 'E', 'O', '1'};

void put_le64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> b{};
  for (int i = 0; i < 8; ++i) b[static_cast<std::size_t>(i)] = static_cast<char>(v >> (8 * i));
  out.write(b.data(), 8);
}

std::uint64_t get_le64(std::istream& in, std::int64_t offset) {
  std::array<unsigned char, 8> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 8))
    throw DataError("geodesic cache: truncated", offset);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[static_cast<std::size_t>(i)];
  return v;
}

}  // namespace

void write_geodesic_cache(std::ostream& out, const GeodesicMatrix& G) {
  out.write(kMagic.data(), kMagic.size());
  const Index n = G.size();
  put_le64(out, static_cast<std::uint64_t>(n));
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) put_le64(out, std::bit_cast<std::uint64_t>(G.dist(i, j)));
}

GeodesicMatrix read_geodesic_cache(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic)
    throw DataError("geodesic cache: bad magic", 0);
  const std::uint64_t n = get_le64(in, 8);
  if (n > (std::uint64_t{1} << 20)) throw DataError("geodesic cache: size overflow", 8);
  const auto nn = static_cast<Index>(n);
  ColMatrix<double> dist(nn, nn);
  std::int64_t offset = 16;
  for (Index i = 0; i < nn; ++i)
    for (Index j = 0; j < nn; ++j, offset += 8)
      dist(i, j) = std::bit_cast<double>(get_le64(in, offset));
  return GeodesicMatrix::from_distances(std::move(dist));
}

void write_geodesic_cache(const std::filesystem::path& path, const GeodesicMatrix& G) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_geodesic_cache(out, G);
}

GeodesicMatrix read_geodesic_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return read_geodesic_cache(in);
}

}  // namespace sisomap
