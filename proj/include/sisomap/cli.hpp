#pragma once

#include "sisomap/stability.hpp"
#include "sisomap/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sisomap::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 2,
  kDataError = 3,
  kNumericalError = 4,
};

/// Everything a command needs to run. Serializes to JSON; the hash covers every
/// field except the output directory, so identical hashes mean comparable runs.
struct RunConfig {
  std::string command;

  // dataset
  std::string dataset = "swissroll";  ///< swissroll | idx | csv
  std::string input;                  ///< idx images or csv samples
  std::string labels;                 ///< idx labels
  std::string truth;                  ///< csv ground truth (optional)
  std::optional<int> digit;           ///< idx label filter
  Index max_rows = 0;                 ///< 0 = all
  Index n = 10000;                    ///< swissroll sample count
  double noise_sd = 0.0;
  double amplitude = 10.0;

  // manifold
  Index k = 10;
  Index d = 2;

  // curves
  std::string mode = "direct";
  std::string schedule = "100:3000:100";
  Index window = 3;
  double threshold = 0.05;
  Index trials = 10;
  Index reference_size = 100;

  // streaming and benchmark
  Index batch_size = 0;  ///< 0 = detect from the error curve
  std::vector<Index> stream_sizes;
  bool skip_baseline = false;

  Seed seed = 0;
  bool single_thread = false;
  std::string out_dir = "out";

  std::string to_json() const;
  static RunConfig from_json(const std::string& text);
  /// FNV-1a of the canonical JSON without out_dir, as 16 hex digits.
  std::string hash() const;
};

/// Seed default; SISOMAP_SEED overrides it when set.
Seed default_seed();

struct Dataset {
  DataMatrix X;
  std::optional<Coords> truth;
  std::string description;
};

Dataset load_dataset(const RunConfig& config);

struct GenerateResult {
  std::filesystem::path data_csv, truth_csv, manifest;
};

struct CurveResult {
  ErrorCurve curve;
  TransitionReport transition;
  std::filesystem::path curve_csv, report_json;
};

struct StreamResult {
  Index batch_size = 0;
  Index stream_size = 0;
  std::optional<double> batch_error;    ///< batch embedding vs ground truth
  std::optional<double> stacked_error;  ///< [batch; stream] vs ground truth
  double mean_relative_residual = 0.0;
  double mean_latency_ns = 0.0;
  std::filesystem::path stream_csv, batch_csv, report_json;
};

struct BenchEntry {
  Index stream_size = 0;
  double batch_seconds = 0.0;
  double stream_seconds = 0.0;  ///< sum of per-point times
  double mean_point_ns = 0.0;
  std::optional<double> baseline_seconds;  ///< Isomap on batch + stream
  std::vector<std::int64_t> per_point_ns;
};

struct BenchReport {
  Index batch_size = 0;
  std::vector<BenchEntry> entries;
  double linear_fit_r_squared = 0.0;  ///< stream_seconds against stream_size, when >= 3 sizes
  std::string machine;
  std::string config_hash;
  std::filesystem::path report_json;
};

GenerateResult cmd_generate(const RunConfig& config);
CurveResult cmd_curve(const RunConfig& config);
StreamResult cmd_stream(const RunConfig& config);
BenchReport cmd_bench(const RunConfig& config);

/// Short description of the host: OS, CPU count, compiler.
std::string machine_descriptor();

/// Parses arguments, runs the command, maps exceptions onto ExitCode.
int main(int argc, char** argv);

}  // namespace sisomap::cli
