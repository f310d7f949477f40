#include "sisomap/random.hpp"

#include <algorithm>
#include <numeric>

namespace sisomap {

namespace {

// splitmix64 finalizer
std::uint64_t mix(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

Seed derive_seed(Seed base, std::uint64_t a, std::uint64_t b) noexcept {
  return mix(mix(mix(base) ^ a) ^ b);
}

std::vector<Index> random_permutation(Index n, Rng& rng) {
  std::vector<Index> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), Index{0});
  // Explicit Fisher-Yates so the permutation does not depend on the standard
  // library's shuffle implementation.
  for (Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Index>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(j)]);
  }
  return p;
}

std::vector<Index> sample_without_replacement(Index n, Index k, Rng& rng) {
  if (k < 0 || k > n) throw InvalidArgument("sample_without_replacement: k out of range");
  std::vector<Index> p = random_permutation(n, rng);
  p.resize(static_cast<std::size_t>(k));
  return p;
}

}  // namespace sisomap
