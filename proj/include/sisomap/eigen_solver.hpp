#pragma once

#include "sisomap/types.hpp"

namespace sisomap {

enum class EigenMethod {
  Auto,     ///< dense for small n, Lanczos otherwise (dense fallback on stall)
  Dense,    ///< full symmetric decomposition
  Lanczos,  ///< Krylov iteration with full reorthogonalization
};

struct EigenPairs {
  Eigen::VectorXd values;   ///< algebraically largest first
  ColMatrix<double> vectors;  ///< unit columns; largest-|entry| of each is positive
};

/// The `count` algebraically largest eigenpairs of a symmetric matrix.
EigenPairs top_eigenpairs(const ColMatrix<double>& A, Index count,
                          EigenMethod method = EigenMethod::Auto);

}  // namespace sisomap
