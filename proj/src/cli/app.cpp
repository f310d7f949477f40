#include "sisomap/cli.hpp"

#include "sisomap/data.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace sisomap::cli {

namespace {

void add_common(CLI::App* sub, RunConfig& c) {
  sub->add_option("--dataset", c.dataset, "swissroll | idx | csv")
      ->check(CLI::IsMember({"swissroll", "idx", "csv"}));
  sub->add_option("--input", c.input, "IDX image file or CSV sample file");
  sub->add_option("--labels", c.labels, "IDX label file");
  sub->add_option("--truth", c.truth, "CSV ground truth matching --input rows");
  sub->add_option("--digit", c.digit, "keep only this label (IDX)");
  sub->add_option("--max-rows", c.max_rows, "read at most this many rows (0 = all)");
  sub->add_option("--n", c.n, "Swiss roll sample count");
  sub->add_option("--noise-sd", c.noise_sd, "Gaussian noise on the Swiss roll");
  sub->add_option("--amplitude", c.amplitude, "Swiss roll scale");
  sub->add_option("--k", c.k, "neighbors");
  sub->add_option("--dim", c.d, "embedding dimension");
  sub->add_option("--seed", c.seed, "RNG seed (default: $SISOMAP_SEED or 0)");
  sub->add_option("--out", c.out_dir, "output directory");
  sub->add_flag("--single-thread", c.single_thread, "run inner loops on one thread");
}

void add_curve_options(CLI::App* sub, RunConfig& c) {
  sub->add_option("--mode", c.mode, "direct | refsample")
      ->check(CLI::IsMember({"direct", "refsample"}));
  sub->add_option("--schedule", c.schedule, "sample sizes start:stop:step");
  sub->add_option("--window", c.window, "transition window w");
  sub->add_option("--threshold", c.threshold, "transition relative-change threshold");
  sub->add_option("--trials", c.trials, "trials per sample size");
  sub->add_option("--reference-size", c.reference_size, "reference set size |F|");
}

void print_summary(const std::string& command, const RunConfig& c) {
  if (command == "generate") {
    const auto r = cmd_generate(c);
    std::cout << "wrote " << r.data_csv.string() << ", " << r.truth_csv.string() << ", "
              << r.manifest.string() << '\n';
  } else if (command == "curve") {
    const auto r = cmd_curve(c);
    std::cout << "curve: " << r.curve.points.size() << " points -> " << r.curve_csv.string() << '\n'
              << "transition_n: "
              << (r.transition.transition_n ? std::to_string(*r.transition.transition_n) : "none")
              << '\n';
  } else if (command == "stream") {
    const auto r = cmd_stream(c);
    std::cout << "batch " << r.batch_size << ", stream " << r.stream_size << '\n';
    if (r.batch_error) std::cout << "batch error:   " << format_double(*r.batch_error) << '\n';
    if (r.stacked_error) std::cout << "stacked error: " << format_double(*r.stacked_error) << '\n';
    std::cout << "mean latency:  " << r.mean_latency_ns << " ns\n"
              << "report: " << r.report_json.string() << '\n';
  } else if (command == "bench") {
    const auto r = cmd_bench(c);
    for (const auto& e : r.entries) {
      std::cout << "m=" << e.stream_size << " batch=" << e.batch_seconds
                << "s stream=" << e.stream_seconds << "s per-point=" << e.mean_point_ns << "ns";
      if (e.baseline_seconds) std::cout << " baseline=" << *e.baseline_seconds << "s";
      std::cout << '\n';
    }
    std::cout << "report: " << r.report_json.string() << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming Isomap: error curves, transition detection and S-Isomap mapping"};
  app.require_subcommand(1);

  RunConfig config;
  std::string config_file;
  try {
    config.seed = default_seed();
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  }
  app.add_option("--config", config_file, "re-run a saved run_config.json");

  auto* generate = app.add_subcommand("generate", "write a Swiss roll data set and ground truth");
  add_common(generate, config);

  auto* curve = app.add_subcommand("curve", "error-vs-sample-size curve and transition point");
  add_common(curve, config);
  add_curve_options(curve, config);

  auto* stream = app.add_subcommand("stream", "learn a batch manifold and map the remaining stream");
  add_common(stream, config);
  add_curve_options(stream, config);
  stream->add_option("--batch-size", config.batch_size, "batch size (0 = detect from the curve)");

  auto* bench = app.add_subcommand("bench", "time S-Isomap against full Isomap");
  add_common(bench, config);
  bench->add_option("--batch-size", config.batch_size, "batch size");
  bench->add_option("--stream-sizes", config.stream_sizes, "stream sizes, comma separated")
      ->delimiter(',');
  bench->add_flag("--skip-baseline", config.skip_baseline, "do not time full Isomap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    std::string command = app.get_subcommands().front()->get_name();
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      if (!in) throw DataError("cannot open " + config_file);
      std::stringstream text;
      text << in.rdbuf();
      config = RunConfig::from_json(text.str());
      if (config.command.empty()) config.command = command;
      if (config.command != command)
        throw InvalidArgument("config was saved for '" + config.command + "', not '" + command + "'");
    }
    config.command = command;
    print_summary(command, config);
    return kSuccess;
  } catch (const InvalidArgument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumericalError;
  }
}

}  // namespace sisomap::cli
