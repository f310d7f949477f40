#include "sisomap/stability.hpp"

#include "sisomap/data.hpp"
#include "sisomap/embed.hpp"
#include "sisomap/procrustes.hpp"
#include "sisomap/random.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string_view>

namespace sisomap {

std::string to_string(ErrorMode mode) {
  return mode == ErrorMode::Direct ? "direct" : "refsample";
}

ErrorMode parse_error_mode(const std::string& s) {
  if (s == "direct") return ErrorMode::Direct;
  if (s == "refsample" || s == "reference" || s == "reference_sample")
    return ErrorMode::ReferenceSample;
  throw InvalidArgument("unknown error mode '" + s + "'");
}

std::vector<Index> make_schedule(Index start, Index stop, Index step) {
  if (start < 1 || step < 1 || stop < start)
    throw InvalidArgument("schedule: need 1 <= start <= stop and step >= 1");
  std::vector<Index> s;
  for (Index n = start; n <= stop; n += step) s.push_back(n);
  return s;
}

std::vector<Index> parse_schedule(const std::string& spec) {
  Index parts[3] = {0, 0, 0};
  std::string_view rest(spec);
  for (int i = 0; i < 3; ++i) {
    const auto colon = rest.find(':');
    if ((i < 2) == (colon == std::string_view::npos))
      throw InvalidArgument("schedule must look like start:stop:step, got '" + spec + "'");
    const std::string_view field = rest.substr(0, colon);
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), parts[i]);
    if (ec != std::errc() || ptr != field.data() + field.size())
      throw InvalidArgument("schedule: bad number '" + std::string(field) + "'");
    if (colon != std::string_view::npos) rest.remove_prefix(colon + 1);
  }
  return make_schedule(parts[0], parts[1], parts[2]);
}

ErrorCurve error_curve(const DataMatrix& X, const Coords* ground_truth,
                       const std::vector<Index>& schedule, const CurveOptions& o) {
  const bool direct = o.mode == ErrorMode::Direct;
  if (direct && !ground_truth) throw InvalidArgument("error_curve: direct mode needs ground truth");
  if (!direct && ground_truth)
    throw InvalidArgument("error_curve: ground truth is only used in direct mode");
  if (ground_truth && ground_truth->rows() != X.rows())
    throw InvalidArgument("error_curve: ground truth row count differs from data");
  if (o.trials < 1) throw InvalidArgument("error_curve: trials must be >= 1");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const Index n = schedule[i];
    if (i > 0 && n <= schedule[i - 1])
      throw InvalidArgument("error_curve: schedule must be strictly increasing");
    const Index needed = direct ? n : 2 * n - o.reference_size;
    if (n <= o.d || needed > X.rows() || (!direct && n <= o.reference_size))
      throw InvalidArgument("error_curve: sample size " + std::to_string(n) +
                            " is not feasible for this data set");
  }

  ErrorCurve curve;
  curve.mode = o.mode;
  for (const Index n : schedule) {
    CurvePoint p;
    p.n = n;
    Index failures = 0;
    for (Index t = 0; t < o.trials; ++t) {
      const Seed cell = derive_seed(o.seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(t));
      try {
        double err = 0.0;
        if (direct) {
          Rng rng(cell);
          const auto rows = sample_without_replacement(X.rows(), n, rng);
          const Embedding e = isomap(take_rows(X, rows), o.k, o.d);
          err = direct_error(take_rows(*ground_truth, rows), e.coords);
        } else {
          ReferenceSampleOptions ro;
          ro.reference_size = o.reference_size;
          ro.sample_size = n - o.reference_size;
          ro.k = o.k;
          ro.d = o.d;
          ro.seed = cell;
          err = reference_sample_error(X, ro);
        }
        p.values.push_back(err);
      } catch (const NumericalError&) {
        ++failures;
      }
    }
    p.trials = static_cast<Index>(p.values.size());
    if (failures > 0)
      p.flag = "skipped " + std::to_string(failures) + " of " + std::to_string(o.trials) +
               " trials (disconnected or singular)";
    if (p.values.empty()) {
      p.mean = std::numeric_limits<double>::quiet_NaN();
      curve.dropped.push_back(std::move(p));
      continue;
    }
    p.mean = std::accumulate(p.values.begin(), p.values.end(), 0.0) / static_cast<double>(p.trials);
    if (p.trials > 1) {
      double ss = 0.0;
      for (double v : p.values) ss += (v - p.mean) * (v - p.mean);
      p.sd = std::sqrt(ss / static_cast<double>(p.trials - 1));
    }
    curve.points.push_back(std::move(p));
  }
  return curve;
}

constexpr double kRatioSlack = 1e-12;

TransitionReport detect_transition(const ErrorCurve& curve, Index window, double threshold) {
  if (window < 2) throw InvalidArgument("detect_transition: window must be >= 2");
  if (!(threshold > 0.0)) throw InvalidArgument("detect_transition: threshold must be > 0");
  const auto& pts = curve.points;
  const auto count = static_cast<Index>(pts.size());
  if (count < window + 1)
    throw InvalidArgument("detect_transition: curve needs at least window + 1 points");

  TransitionReport report;
  report.window = window;
  report.threshold = threshold;
  report.rule = "first n_i with |e[j+1]-e[j]| / min(e[j], e[j+1]) < " + format_double(threshold) +
                " for j = i .. i+" + std::to_string(window - 1);

  auto small_change = [&](Index j) {
    const double a = pts[static_cast<std::size_t>(j)].mean;
    const double b = pts[static_cast<std::size_t>(j + 1)].mean;
    const double denom = std::min(a, b);
    if (denom <= 0.0) return true;
    // Curve values are decimal in spirit: 0.105 - 0.100 must not slip under a
    // 5% threshold because of binary rounding, so ratios within rounding of
    // the threshold count as equal to it.
    return std::abs(b - a) / denom < threshold * (1.0 - kRatioSlack);
  };

  for (Index i = 0; i + window < count; ++i) {
    bool stable = true;
    for (Index j = i; j < i + window && stable; ++j) stable = small_change(j);
    if (stable) {
      report.transition_n = pts[static_cast<std::size_t>(i)].n;
      break;
    }
  }
  return report;
}

PowerLawFit fit_power_law(const ErrorCurve& curve, double head_fraction) {
  if (!(head_fraction > 0.0 && head_fraction <= 1.0))
    throw InvalidArgument("fit_power_law: head_fraction must be in (0, 1]");
  const auto count = static_cast<Index>(
      std::floor(head_fraction * static_cast<double>(curve.points.size()) + 1e-9));
  if (count < 3) throw InvalidArgument("fit_power_law: need at least 3 points in the head");

  Eigen::VectorXd x(count), y(count);
  for (Index i = 0; i < count; ++i) {
    const auto& p = curve.points[static_cast<std::size_t>(i)];
    if (!(p.mean > 0.0)) throw InvalidArgument("fit_power_law: errors must be positive");
    x(i) = std::log(static_cast<double>(p.n));
    y(i) = std::log(p.mean);
  }
  const double mx = x.mean(), my = y.mean();
  const Eigen::VectorXd dx = x.array() - mx, dy = y.array() - my;
  const double sxx = dx.squaredNorm();
  if (!(sxx > 0.0)) throw InvalidArgument("fit_power_law: sample sizes must differ");

  PowerLawFit fit;
  fit.points = count;
  fit.exponent = dx.dot(dy) / sxx;
  fit.intercept = my - fit.exponent * mx;
  const double syy = dy.squaredNorm();
  const double sse = (dy - fit.exponent * dx).squaredNorm();
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
  return fit;
}

void write_curve_csv(std::ostream& out, const ErrorCurve& curve, const std::string& comment) {
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "n,mean_error,sd_error,trials,mode,flag\n";
  std::vector<const CurvePoint*> all;
  for (const auto& p : curve.points) all.push_back(&p);
  for (const auto& p : curve.dropped) all.push_back(&p);
  std::sort(all.begin(), all.end(), [](auto* a, auto* b) { return a->n < b->n; });
  for (const CurvePoint* p : all) {
    out << p->n << ',' << (p->trials ? format_double(p->mean) : "nan") << ','
        << (p->trials ? format_double(p->sd) : "nan") << ',' << p->trials << ','
        << to_string(curve.mode) << ',' << (p->trials ? p->flag : "dropped: " + p->flag) << '\n';
  }
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) throw InvalidArgument("pearson: need equal lengths >= 2");
  const auto n = static_cast<Index>(a.size());
  const Eigen::Map<const Eigen::VectorXd> x(a.data(), n), y(b.data(), n);
  const Eigen::VectorXd dx = x.array() - x.mean(), dy = y.array() - y.mean();
  const double denom = std::sqrt(dx.squaredNorm() * dy.squaredNorm());
  if (!(denom > 0.0)) throw InvalidArgument("pearson: zero variance");
  return dx.dot(dy) / denom;
}

}  // namespace sisomap
