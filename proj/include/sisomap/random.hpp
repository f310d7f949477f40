#pragma once

#include "sisomap/types.hpp"

#include <random>
#include <vector>

namespace sisomap {

using Rng = std::mt19937_64;

/// Deterministic child seed for a (base, a, b) key, so that sweep cells can be
/// evaluated in any order and still draw the same streams.
Seed derive_seed(Seed base, std::uint64_t a, std::uint64_t b = 0) noexcept;

/// Uniform random permutation of 0..n-1.
std::vector<Index> random_permutation(Index n, Rng& rng);

/// k distinct indices drawn uniformly from 0..n-1, in draw order.
std::vector<Index> sample_without_replacement(Index n, Index k, Rng& rng);

/// Rows of `m` selected by `idx`, in that order.
template <typename Derived>
auto take_rows(const Eigen::MatrixBase<Derived>& m, const std::vector<Index>& idx) {
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic,
                Derived::IsRowMajor ? Eigen::RowMajor : Eigen::ColMajor>
      out(static_cast<Index>(idx.size()), m.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Index>(i)) = m.row(idx[i]);
  return out;
}

}  // namespace sisomap
