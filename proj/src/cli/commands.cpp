#include "sisomap/cli.hpp"

#include "sisomap/data.hpp"
#include "sisomap/embed.hpp"
#include "sisomap/parallel.hpp"
#include "sisomap/procrustes.hpp"
#include "sisomap/random.hpp"
#include "sisomap/stream.hpp"

#include <json.hpp>
#include <sys/utsname.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

namespace sisomap::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json config_json(const RunConfig& c, bool with_out_dir) {
  json j = {
      {"command", c.command},
      {"dataset", c.dataset},
      {"input", c.input},
      {"labels", c.labels},
      {"truth", c.truth},
      {"digit", c.digit ? json(*c.digit) : json(nullptr)},
      {"max_rows", c.max_rows},
      {"n", c.n},
      {"noise_sd", c.noise_sd},
      {"amplitude", c.amplitude},
      {"k", c.k},
      {"d", c.d},
      {"mode", c.mode},
      {"schedule", c.schedule},
      {"window", c.window},
      {"threshold", c.threshold},
      {"trials", c.trials},
      {"reference_size", c.reference_size},
      {"batch_size", c.batch_size},
      {"stream_sizes", c.stream_sizes},
      {"skip_baseline", c.skip_baseline},
      {"seed", c.seed},
      {"single_thread", c.single_thread},
  };
  if (with_out_dir) j["out_dir"] = c.out_dir;
  return j;
}

fs::path prepare_out_dir(const RunConfig& c) {
  const fs::path dir(c.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw DataError("cannot create output directory " + dir.string() + ": " + ec.message());
  std::ofstream out(dir / "run_config.json");
  if (!out) throw DataError("cannot write to output directory " + dir.string());
  out << c.to_json() << '\n';
  return dir;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

std::string header(const RunConfig& c) { return "config_hash=" + c.hash(); }

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void apply_threading(const RunConfig& c) {
  if (c.single_thread) set_thread_count(1);
}

}  // namespace

// ---------------------------------------------------------------------------
// RunConfig

std::string RunConfig::to_json() const { return config_json(*this, true).dump(2); }

RunConfig RunConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("run config: ") + e.what());
  }
  RunConfig c;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key) && !j[key].is_null()) j[key].get_to(field);
  };
  try {
    get("command", c.command);
    get("dataset", c.dataset);
    get("input", c.input);
    get("labels", c.labels);
    get("truth", c.truth);
    if (j.contains("digit") && !j["digit"].is_null()) c.digit = j["digit"].get<int>();
    get("max_rows", c.max_rows);
    get("n", c.n);
    get("noise_sd", c.noise_sd);
    get("amplitude", c.amplitude);
    get("k", c.k);
    get("d", c.d);
    get("mode", c.mode);
    get("schedule", c.schedule);
    get("window", c.window);
    get("threshold", c.threshold);
    get("trials", c.trials);
    get("reference_size", c.reference_size);
    get("batch_size", c.batch_size);
    get("stream_sizes", c.stream_sizes);
    get("skip_baseline", c.skip_baseline);
    get("seed", c.seed);
    get("single_thread", c.single_thread);
    get("out_dir", c.out_dir);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("run config: ") + e.what());
  }
  return c;
}

std::string RunConfig::hash() const {
  const std::string canonical = config_json(*this, false).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream s;
  s << std::hex;
  s.width(16);
  s.fill('0');
  s << h;
  return s.str();
}

Seed default_seed() {
  if (const char* env = std::getenv("SISOMAP_SEED")) {
    try {
      return static_cast<Seed>(std::stoull(env));
    } catch (const std::exception&) {
      throw InvalidArgument(std::string("SISOMAP_SEED is not an unsigned integer: ") + env);
    }
  }
  return 0;
}

std::string machine_descriptor() {
  std::ostringstream s;
  utsname u{};
  if (uname(&u) == 0) s << u.sysname << ' ' << u.release << ' ' << u.machine << "; ";
  s << "hardware_threads=" << std::thread::hardware_concurrency()
    << "; worker_threads=" << thread_count() << "; compiler=" << __VERSION__;
  return s.str();
}

// ---------------------------------------------------------------------------
// Datasets

Dataset load_dataset(const RunConfig& c) {
  Dataset ds;
  if (c.dataset == "swissroll") {
    SwissRollOptions opt;
    opt.noise_sd = c.noise_sd;
    opt.amplitude = c.amplitude;
    SwissRoll roll = gen_swiss_roll(c.n, c.seed, opt);
    ds.X = std::move(roll.points);
    ds.truth = std::move(roll.truth.coords);
    ds.description = "swissroll n=" + std::to_string(c.n);
  } else if (c.dataset == "idx") {
    if (c.input.empty()) throw InvalidArgument("--input is required for --dataset idx");
    IdxLoadOptions opt;
    if (!c.labels.empty()) opt.labels_path = c.labels;
    if (c.digit) {
      if (*c.digit < 0 || *c.digit > 255) throw InvalidArgument("--digit must be a byte label");
      opt.label_filter = static_cast<std::uint8_t>(*c.digit);
    }
    if (c.max_rows > 0) opt.max_rows = c.max_rows;
    ds.X = load_idx(c.input, opt).X;
    ds.description = "idx " + c.input + (c.digit ? " digit=" + std::to_string(*c.digit) : "");
  } else if (c.dataset == "csv") {
    if (c.input.empty()) throw InvalidArgument("--input is required for --dataset csv");
    ds.X = read_csv(fs::path(c.input));
    if (c.max_rows > 0 && c.max_rows < ds.X.rows()) ds.X.conservativeResize(c.max_rows, Eigen::NoChange);
    if (!c.truth.empty()) {
      Coords t = read_csv(fs::path(c.truth));
      if (t.rows() < ds.X.rows()) throw DataError("ground truth has fewer rows than the data");
      ds.truth = t.topRows(ds.X.rows());
    }
    ds.description = "csv " + c.input;
  } else {
    throw InvalidArgument("unknown dataset '" + c.dataset + "' (swissroll, idx, csv)");
  }
  if (ds.X.rows() == 0) throw DataError("dataset is empty");
  return ds;
}

// ---------------------------------------------------------------------------
// Commands

GenerateResult cmd_generate(const RunConfig& c) {
  if (c.dataset != "swissroll") throw InvalidArgument("generate only supports --dataset swissroll");
  const fs::path dir = prepare_out_dir(c);
  SwissRollOptions opt;
  opt.noise_sd = c.noise_sd;
  opt.amplitude = c.amplitude;
  const SwissRoll roll = gen_swiss_roll(c.n, c.seed, opt);

  GenerateResult r{dir / "swissroll.csv", dir / "swissroll_truth.csv", dir / "manifest.json"};
  {
    auto out = open_out(r.data_csv);
    write_csv(out, roll.points);
  }
  {
    auto out = open_out(r.truth_csv);
    write_csv(out, roll.truth.coords);
  }
  const json manifest = {{"generator", "euler_isometric_swiss_roll"},
                         {"n", c.n},
                         {"seed", c.seed},
                         {"noise_sd", c.noise_sd},
                         {"amplitude", c.amplitude},
                         {"t_range", {roll.truth.t_min, roll.truth.t_max}},
                         {"r_range", {roll.truth.r_min, roll.truth.r_max}},
                         {"config_hash", c.hash()}};
  open_out(r.manifest) << manifest.dump(2) << '\n';
  return r;
}

namespace {

CurveOptions curve_options(const RunConfig& c) {
  CurveOptions o;
  o.mode = parse_error_mode(c.mode);
  o.k = c.k;
  o.d = c.d;
  o.trials = c.trials;
  o.seed = c.seed;
  o.reference_size = c.reference_size;
  return o;
}

std::vector<Index> checked_schedule(const RunConfig& c) {
  std::vector<Index> schedule = parse_schedule(c.schedule);
  if (c.window < 2) throw InvalidArgument("--window must be >= 2");
  if (static_cast<Index>(schedule.size()) < c.window + 1)
    throw InvalidArgument("schedule has " + std::to_string(schedule.size()) +
                          " points; transition detection needs at least window + 1 = " +
                          std::to_string(c.window + 1));
  return schedule;
}

ErrorCurve run_curve(const RunConfig& c, const Dataset& ds, const std::vector<Index>& schedule) {
  const CurveOptions o = curve_options(c);
  if (o.mode == ErrorMode::Direct && !ds.truth)
    throw InvalidArgument("direct mode needs ground truth (use --mode refsample)");
  const Coords* truth = o.mode == ErrorMode::Direct ? &*ds.truth : nullptr;
  return error_curve(ds.X, truth, schedule, o);
}

json transition_json(const TransitionReport& t) {
  return {{"transition_n", t.transition_n ? json(*t.transition_n) : json(nullptr)},
          {"window", t.window},
          {"threshold", t.threshold},
          {"rule", t.rule}};
}

}  // namespace

CurveResult cmd_curve(const RunConfig& c) {
  apply_threading(c);
  const std::vector<Index> schedule = checked_schedule(c);
  parse_error_mode(c.mode);
  const Dataset ds = load_dataset(c);
  const fs::path dir = prepare_out_dir(c);

  CurveResult r;
  r.curve = run_curve(c, ds, schedule);
  if (static_cast<Index>(r.curve.points.size()) < c.window + 1)
    throw NumericalError("too few schedule points survived to detect a transition");
  r.transition = detect_transition(r.curve, c.window, c.threshold);

  r.curve_csv = dir / "curve.csv";
  r.report_json = dir / "transition.json";
  {
    auto out = open_out(r.curve_csv);
    write_curve_csv(out, r.curve, header(c));
  }
  json report = transition_json(r.transition);
  report["dataset"] = ds.description;
  report["mode"] = c.mode;
  report["dropped_sizes"] = json::array();
  for (const auto& p : r.curve.dropped) report["dropped_sizes"].push_back(p.n);
  report["config_hash"] = c.hash();
  open_out(r.report_json) << report.dump(2) << '\n';
  return r;
}

StreamResult cmd_stream(const RunConfig& c) {
  apply_threading(c);
  const Dataset ds = load_dataset(c);
  const fs::path dir = prepare_out_dir(c);
  const Index total = ds.X.rows();

  StreamResult r;
  json report;
  Index batch = c.batch_size;
  if (batch <= 0) {
    const std::vector<Index> schedule = checked_schedule(c);
    const TransitionReport t = detect_transition(run_curve(c, ds, schedule), c.window, c.threshold);
    if (!t.transition_n) throw NumericalError("no transition point detected; pass --batch-size");
    batch = *t.transition_n;
    report["detected_transition"] = transition_json(t);
  }
  if (batch > total) throw InvalidArgument("--batch-size exceeds the data set size");

  // A batch covering the whole data set leaves an empty stream.
  std::vector<Index> order(static_cast<std::size_t>(total));
  std::iota(order.begin(), order.end(), Index{0});
  DataMatrix X_b, X_s(0, ds.X.cols());
  if (batch < total) {
    StreamSource src = make_stream(ds.X, batch, derive_seed(c.seed, 0x73747265616dULL));
    order = std::move(src.order);
    X_b = std::move(src.batch);
    X_s = std::move(src.remainder);
  } else {
    X_b = ds.X;
  }

  const BatchModel model = BatchModel::build(std::move(X_b), c.k, c.d);
  const StreamMapping mapping = run_stream(model, X_s);

  r.batch_size = batch;
  r.stream_size = X_s.rows();
  if (!mapping.relative_residuals.empty())
    r.mean_relative_residual =
        std::accumulate(mapping.relative_residuals.begin(), mapping.relative_residuals.end(), 0.0) /
        static_cast<double>(mapping.relative_residuals.size());
  if (!mapping.per_point_nanos.empty())
    r.mean_latency_ns = static_cast<double>(std::accumulate(mapping.per_point_nanos.begin(),
                                                            mapping.per_point_nanos.end(),
                                                            std::int64_t{0})) /
                        static_cast<double>(mapping.per_point_nanos.size());

  if (ds.truth) {
    const Coords truth = take_rows(*ds.truth, order);
    r.batch_error = direct_error(truth.topRows(batch), model.coords());
    Coords stacked(total, c.d);
    stacked << model.coords(), mapping.coords;
    r.stacked_error = direct_error(truth, stacked);
  }

  r.stream_csv = dir / "stream.csv";
  r.batch_csv = dir / "batch_embedding.csv";
  r.report_json = dir / "quality.json";
  {
    auto out = open_out(r.stream_csv);
    write_stream_csv(out, mapping, header(c));
  }
  {
    auto out = open_out(r.batch_csv);
    out << "# " << header(c) << '\n';
    write_csv(out, model.coords());
  }
  report["dataset"] = ds.description;
  report["batch_size"] = r.batch_size;
  report["stream_size"] = r.stream_size;
  report["batch_error"] = r.batch_error ? json(*r.batch_error) : json(nullptr);
  report["stacked_error"] = r.stacked_error ? json(*r.stacked_error) : json(nullptr);
  if (r.batch_error && r.stacked_error && *r.batch_error > 0.0)
    report["stacked_to_batch_ratio"] = *r.stacked_error / *r.batch_error;
  report["batch_residual_variance"] = residual_variance(model.geodesics(), model.embedding());
  report["mean_relative_lsq_residual"] = r.mean_relative_residual;
  report["mean_latency_ns"] = r.mean_latency_ns;
  report["config_hash"] = c.hash();
  open_out(r.report_json) << report.dump(2) << '\n';
  return r;
}

BenchReport cmd_bench(const RunConfig& c) {
  apply_threading(c);
  if (c.batch_size < 2) throw InvalidArgument("bench needs --batch-size");
  std::vector<Index> sizes = c.stream_sizes;
  if (sizes.empty()) sizes.push_back(std::max<Index>(0, c.n - c.batch_size));
  for (Index m : sizes)
    if (m < 0) throw InvalidArgument("stream sizes must be non-negative");
  const Index largest = *std::max_element(sizes.begin(), sizes.end());

  const Dataset ds = load_dataset(c);
  if (c.batch_size + largest > ds.X.rows())
    throw InvalidArgument("data set has " + std::to_string(ds.X.rows()) + " rows; bench needs " +
                          std::to_string(c.batch_size + largest));
  const fs::path dir = prepare_out_dir(c);

  // Fixed arrival order; the batch is the first batch_size rows.
  Rng rng(derive_seed(c.seed, 0x62656e6368ULL));
  const std::vector<Index> order = random_permutation(ds.X.rows(), rng);
  const std::vector<Index> batch_rows(order.begin(), order.begin() + c.batch_size);

  BenchReport report;
  report.batch_size = c.batch_size;
  report.machine = machine_descriptor();
  report.config_hash = c.hash();

  auto start = std::chrono::steady_clock::now();
  const BatchModel model = BatchModel::build(take_rows(ds.X, batch_rows), c.k, c.d);
  const double batch_seconds = seconds_since(start);

  for (const Index m : sizes) {
    BenchEntry e;
    e.stream_size = m;
    e.batch_seconds = batch_seconds;
    const std::vector<Index> stream_rows(order.begin() + c.batch_size,
                                         order.begin() + c.batch_size + m);
    const DataMatrix X_s = take_rows(ds.X, stream_rows);
    // Warm-up pass, not recorded.
    for (Index i = 0; i < std::min<Index>(m, 16); ++i) (void)map_point(model, X_s.row(i));
    const StreamMapping mapping = run_stream(model, X_s, false);
    e.per_point_ns = mapping.per_point_nanos;
    const auto total_ns =
        std::accumulate(e.per_point_ns.begin(), e.per_point_ns.end(), std::int64_t{0});
    e.stream_seconds = static_cast<double>(total_ns) * 1e-9;
    e.mean_point_ns = m > 0 ? static_cast<double>(total_ns) / static_cast<double>(m) : 0.0;

    if (!c.skip_baseline) {
      std::vector<Index> all(order.begin(), order.begin() + c.batch_size + m);
      const DataMatrix X_all = take_rows(ds.X, all);
      start = std::chrono::steady_clock::now();
      (void)isomap(X_all, c.k, c.d);
      e.baseline_seconds = seconds_since(start);
    }
    report.entries.push_back(std::move(e));
  }

  if (report.entries.size() >= 3) {
    Eigen::VectorXd x(static_cast<Index>(report.entries.size())), y(x.size());
    for (Index i = 0; i < x.size(); ++i) {
      x(i) = static_cast<double>(report.entries[static_cast<std::size_t>(i)].stream_size);
      y(i) = report.entries[static_cast<std::size_t>(i)].stream_seconds;
    }
    const Eigen::VectorXd dx = x.array() - x.mean(), dy = y.array() - y.mean();
    const double sxy = dx.dot(dy), sxx = dx.squaredNorm(), syy = dy.squaredNorm();
    report.linear_fit_r_squared = (sxx > 0 && syy > 0) ? sxy * sxy / (sxx * syy) : 1.0;
  }

  report.report_json = dir / "bench.json";
  json j = {{"batch_size", report.batch_size},
            {"batch_seconds", batch_seconds},
            {"machine", report.machine},
            {"config_hash", report.config_hash},
            {"linear_fit_r_squared", report.linear_fit_r_squared},
            {"entries", json::array()}};
  for (const auto& e : report.entries) {
    json je = {{"stream_size", e.stream_size},
               {"stream_seconds", e.stream_seconds},
               {"pipeline_seconds", e.batch_seconds + e.stream_seconds},
               {"mean_point_ns", e.mean_point_ns},
               {"baseline_seconds", e.baseline_seconds ? json(*e.baseline_seconds) : json(nullptr)}};
    if (e.baseline_seconds && e.batch_seconds + e.stream_seconds > 0.0)
      je["speedup"] = *e.baseline_seconds / (e.batch_seconds + e.stream_seconds);
    j["entries"].push_back(je);
  }
  open_out(report.report_json) << j.dump(2) << '\n';

  // Per-point latencies and cumulative time for plotting.
  auto out = open_out(dir / "bench_points.csv");
  out << "# " << header(c) << '\n' << "stream_size,index,latency_ns,cumulative_ns\n";
  for (const auto& e : report.entries) {
    std::int64_t cumulative = 0;
    for (std::size_t i = 0; i < e.per_point_ns.size(); ++i) {
      cumulative += e.per_point_ns[i];
      out << e.stream_size << ',' << i << ',' << e.per_point_ns[i] << ',' << cumulative << '\n';
    }
  }
  return report;
}

}  // namespace sisomap::cli
