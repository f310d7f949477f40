#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sisomap {

using Index = Eigen::Index;

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using ColMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// n x D samples, one sample per row. Row-major so that a sample is contiguous.
using DataMatrix = RowMatrix<double>;

/// n x d low-dimensional coordinates, one point per row.
using Coords = ColMatrix<double>;

using Seed = std::uint64_t;

// ---------------------------------------------------------------------------
// Errors. The CLI maps each family onto an exit code.

/// Bad arguments or violated preconditions.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or unreadable input data.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what, std::int64_t offset = -1)
      : std::runtime_error(offset >= 0 ? what + " (at byte offset " + std::to_string(offset) + ")"
                                       : what),
        offset_(offset) {}

  /// Byte offset of the failure inside a binary file, or -1 when not applicable.
  std::int64_t offset() const noexcept { return offset_; }

 private:
  std::int64_t offset_;
};

/// Numerical breakdown: singular systems, degenerate spectra.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The neighbor graph has more than one connected component.
class DisconnectedGraph : public NumericalError {
 public:
  DisconnectedGraph(const std::string& what, std::vector<std::vector<Index>> components)
      : NumericalError(what), components_(std::move(components)) {}

  /// Node partition, one entry per connected component, each sorted ascending.
  const std::vector<std::vector<Index>>& components() const noexcept { return components_; }

 private:
  std::vector<std::vector<Index>> components_;
};

/// Throws InvalidArgument unless every entry is finite.
template <typename Derived>
void require_finite(const Eigen::DenseBase<Derived>& m, const char* what) {
  if (!m.allFinite()) throw InvalidArgument(std::string(what) + ": non-finite value");
}

}  // namespace sisomap
