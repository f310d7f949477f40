#pragma once

#include "sisomap/types.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

namespace sisomap {

// ---------------------------------------------------------------------------
// Euler spiral

struct FresnelPair {
  double x;  ///< integral of sin(s^2) over [0, t]
  double y;  ///< integral of cos(s^2) over [0, t]
};

/// Fresnel integrals by adaptive Simpson quadrature, evaluated to absolute
/// error <= min(tol, 1e-13).
/// Negative t is accepted (both integrals are odd in t).
FresnelPair fresnel(double t, double tol = 1e-10);

// ---------------------------------------------------------------------------
// Euler isometric Swiss roll

struct GroundTruth {
  Coords coords;  ///< n x 2, rows (t, r)
  double t_min = 1.0, t_max = 3.0;
  double r_min = 0.0, r_max = 1.0;
};

struct SwissRollOptions {
  double noise_sd = 0.0;
  /// Uniform scale applied to the surface; the roll is isometric to c * (t, r).
  double amplitude = 10.0;
};

struct SwissRoll {
  DataMatrix points;  ///< n x 3
  GroundTruth truth;
};

/// Maps rectangle coordinates onto the roll surface without noise.
Eigen::Vector3d swiss_roll_point(double t, double r, double amplitude = 10.0);

/// Samples (t, r) uniformly on [1,3] x [0,1] and lifts them onto the roll.
/// Deterministic in (n, seed, options).
SwissRoll gen_swiss_roll(Index n, Seed seed, const SwissRollOptions& options = {});

// ---------------------------------------------------------------------------
// IDX (MNIST) files. Big-endian headers; images magic 0x00000803, labels 0x00000801.

struct IdxImages {
  std::uint32_t count = 0;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<std::uint8_t> pixels;  ///< count * rows * cols, row-major per image
};

IdxImages read_idx_images(std::istream& in);
IdxImages read_idx_images(const std::filesystem::path& path);
std::vector<std::uint8_t> read_idx_labels(std::istream& in);
std::vector<std::uint8_t> read_idx_labels(const std::filesystem::path& path);

void write_idx_images(std::ostream& out, const IdxImages& images);
void write_idx_labels(std::ostream& out, const std::vector<std::uint8_t>& labels);

struct LabeledData {
  DataMatrix X;                      ///< pixels / 255, one flattened image per row
  std::vector<std::uint8_t> labels;  ///< empty when no label file was given
};

struct IdxLoadOptions {
  std::optional<std::filesystem::path> labels_path;
  std::optional<Index> max_rows;
  std::optional<std::uint8_t> label_filter;  ///< requires labels_path
};

LabeledData load_idx(const std::filesystem::path& images_path, const IdxLoadOptions& options = {});

// ---------------------------------------------------------------------------
// CSV: one sample per line, comma separated, no header, '.' decimal point.
// Lines starting with '#' are skipped on read.

DataMatrix read_csv(const std::filesystem::path& path);
DataMatrix read_csv(std::istream& in);

/// Writes with 17 significant digits so that values round-trip exactly.
void write_csv(std::ostream& out, const Eigen::Ref<const ColMatrix<double>>& m);

/// `v` with 17 significant digits (%.17g), enough to read back exactly.
std::string format_double(double v);

// ---------------------------------------------------------------------------
// Simulated stream

struct StreamSource {
  DataMatrix batch;
  DataMatrix remainder;
  std::vector<Index> order;  ///< order[i] = input row emitted at position i
  Seed seed = 0;
};

/// Shuffles rows by seed; the first batch_size rows form the batch.
StreamSource make_stream(const DataMatrix& X, Index batch_size, Seed seed);

}  // namespace sisomap
