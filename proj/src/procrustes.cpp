#include "sisomap/procrustes.hpp"

#include "sisomap/embed.hpp"
#include "sisomap/random.hpp"

namespace sisomap {

double reference_sample_error(const DataMatrix& X, const ReferenceSampleOptions& o) {
  const Index n = X.rows();
  const Index f = o.reference_size;
  const Index r = o.sample_size;
  if (f < 1 || r < 0) throw InvalidArgument("reference_sample_error: sizes must be positive");
  const Index needed = o.shared_sample ? f + r : f + 2 * r;
  if (needed > n)
    throw InvalidArgument("reference_sample_error: need " + std::to_string(needed) +
                          " samples, have " + std::to_string(n));
  if (o.d >= f) throw InvalidArgument("reference_sample_error: d must be below the reference size");

  Rng rng(o.seed);
  const std::vector<Index> pick = sample_without_replacement(n, needed, rng);
  const auto f_end = pick.begin() + f;
  const auto r1_end = f_end + r;
  const auto r2_begin = o.shared_sample ? f_end : r1_end;

  auto run = [&](auto r_begin, int which) {
    std::vector<Index> rows(pick.begin(), f_end);
    rows.insert(rows.end(), r_begin, r_begin + r);
    try {
      return isomap(take_rows(X, rows), o.k, o.d);
    } catch (const DisconnectedGraph& e) {
      throw DisconnectedGraph("reference-sample run " + std::to_string(which) + ": " + e.what(),
                              e.components());
    }
  };

  const Embedding e1 = run(f_end, 1);
  const Embedding e2 = run(r2_begin, 2);
  return procrustes_align(e1.coords.topRows(f), e2.coords.topRows(f)).error;
}

}  // namespace sisomap
