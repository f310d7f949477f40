#pragma once

#include "sisomap/types.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sisomap {

enum class ErrorMode { Direct, ReferenceSample };

std::string to_string(ErrorMode mode);
ErrorMode parse_error_mode(const std::string& s);

struct CurvePoint {
  Index n = 0;
  double mean = 0.0;              ///< mean error over successful trials
  double sd = 0.0;                ///< sample standard deviation (0 for one trial)
  Index trials = 0;               ///< successful trials
  std::vector<double> values;     ///< per-trial errors, trial order
  std::string flag;               ///< empty, or why some trials were skipped
};

struct ErrorCurve {
  ErrorMode mode = ErrorMode::Direct;
  std::vector<CurvePoint> points;   ///< strictly increasing n
  std::vector<CurvePoint> dropped;  ///< sizes where no trial succeeded
};

struct CurveOptions {
  ErrorMode mode = ErrorMode::Direct;
  Index k = 10;
  Index d = 2;
  Index trials = 10;
  Seed seed = 0;
  Index reference_size = 100;  ///< |F| in reference-sample mode
};

/// Error vs sample size. In direct mode each cell embeds a fresh random
/// subsample of n rows and compares it with the matching ground-truth rows.
/// In reference-sample mode n is the size of each learned set F u R_i, so
/// |R_i| = n - reference_size. Cells are seeded by (seed, n, trial).
ErrorCurve error_curve(const DataMatrix& X, const Coords* ground_truth,
                       const std::vector<Index>& schedule, const CurveOptions& options);

/// start:stop:step, inclusive of stop when it lands on the grid.
std::vector<Index> parse_schedule(const std::string& spec);
std::vector<Index> make_schedule(Index start, Index stop, Index step);

struct TransitionReport {
  std::optional<Index> transition_n;
  Index window = 3;
  double threshold = 0.05;
  std::string rule;
};

/// First curve point from which the next `window` consecutive relative changes
/// |e[j+1] - e[j]| / min(e[j], e[j+1]) are all below `threshold`. A zero error
/// in the ratio counts as converged.
TransitionReport detect_transition(const ErrorCurve& curve, Index window = 3,
                                   double threshold = 0.05);

struct PowerLawFit {
  double exponent = 0.0;   ///< slope of log(error) against log(n)
  double intercept = 0.0;  ///< natural log of the prefactor
  double r_squared = 0.0;
  Index points = 0;
};

/// Least squares on (log n, log error) over the first `head_fraction` of points.
PowerLawFit fit_power_law(const ErrorCurve& curve, double head_fraction = 0.5);

/// Columns n,mean_error,sd_error,trials,mode,flag; an optional '#' comment line first.
void write_curve_csv(std::ostream& out, const ErrorCurve& curve, const std::string& comment = {});

/// Pearson correlation of two equally long sequences.
double pearson(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace sisomap
