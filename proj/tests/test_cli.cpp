#include "sisomap/cli.hpp"
#include "sisomap/data.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace sisomap;
namespace fs = std::filesystem;

namespace {

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "sisomap");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli::main(static_cast<int>(argv.size()), argv.data());
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() /
                     ("sisomap_cli_" + name + "_" + std::to_string(std::random_device{}()));
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("generate is byte-identical for a fixed seed") {
  const fs::path a = scratch_dir("gen_a"), b = scratch_dir("gen_b");
  CHECK(run({"generate", "--n", "300", "--seed", "5", "--out", a.string()}) == cli::kSuccess);
  CHECK(run({"generate", "--n", "300", "--seed", "5", "--out", b.string()}) == cli::kSuccess);
  for (const char* f : {"swissroll.csv", "swissroll_truth.csv", "manifest.json"})
    CHECK(slurp(a / f) == slurp(b / f));
  const DataMatrix X = read_csv(a / "swissroll.csv");
  CHECK(X.rows() == 300);
  CHECK(X.cols() == 3);
  CHECK(X == gen_swiss_roll(300, 5).points);
  const auto manifest = nlohmann::json::parse(slurp(a / "manifest.json"));
  CHECK(manifest["n"] == 300);
  CHECK(fs::exists(a / "run_config.json"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("run config round trip and hash") {
  cli::RunConfig c;
  c.command = "curve";
  c.k = 7;
  c.digit = 3;
  c.stream_sizes = {10, 20};
  const auto back = cli::RunConfig::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());
  CHECK(back.hash() == c.hash());
  cli::RunConfig moved = c;
  moved.out_dir = "elsewhere";
  CHECK(moved.hash() == c.hash());
  moved.k = 8;
  CHECK(moved.hash() != c.hash());
  CHECK_THROWS_AS(cli::RunConfig::from_json("{not json"), InvalidArgument);
}

TEST_CASE("exit codes") {
  const fs::path dir = scratch_dir("codes");
  CHECK(run({"curve", "--schedule", "100:300:100", "--window", "3", "--out", dir.string()}) ==
        cli::kUsageError);
  CHECK(run({"curve", "--k", "notanumber"}) == cli::kUsageError);
  CHECK(run({"frobnicate"}) == cli::kUsageError);
  CHECK(run({"curve", "--dataset", "csv", "--input", (dir / "missing.csv").string(), "--mode",
             "refsample", "--out", dir.string()}) == cli::kDataError);

  fs::create_directories(dir);
  {
    std::ofstream bad(dir / "bad.idx", std::ios::binary);
    bad << "not an idx file";
  }
  CHECK(run({"curve", "--dataset", "idx", "--input", (dir / "bad.idx").string(), "--mode",
             "refsample", "--out", dir.string()}) == cli::kDataError);

  // Two far-apart clusters with k=1: every neighbor graph is disconnected.
  {
    std::ofstream csv(dir / "split.csv");
    for (int i = 0; i < 40; ++i) csv << (i % 2 ? 1000.0 : 0.0) + 0.01 * i << ",0\n";
  }
  CHECK(run({"stream", "--dataset", "csv", "--input", (dir / "split.csv").string(), "--k", "1",
             "--dim", "1", "--batch-size", "20", "--out", dir.string()}) == cli::kNumericalError);
  fs::remove_all(dir);
}

TEST_CASE("stream with an empty remainder") {
  const fs::path dir = scratch_dir("stream");
  REQUIRE(run({"generate", "--n", "250", "--seed", "2", "--out", dir.string()}) == cli::kSuccess);
  CHECK(run({"stream", "--dataset", "csv", "--input", (dir / "swissroll.csv").string(), "--truth",
             (dir / "swissroll_truth.csv").string(), "--batch-size", "250", "--out",
             (dir / "s").string()}) == cli::kSuccess);
  const auto q = nlohmann::json::parse(slurp(dir / "s" / "quality.json"));
  CHECK(q["stream_size"] == 0);
  CHECK(q["batch_error"].get<double>() == doctest::Approx(q["stacked_error"].get<double>()));
  CHECK(read_csv(dir / "s" / "batch_embedding.csv").rows() == 250);

  CHECK(run({"stream", "--dataset", "csv", "--input", (dir / "swissroll.csv").string(), "--truth",
             (dir / "swissroll_truth.csv").string(), "--batch-size", "150", "--out",
             (dir / "t").string()}) == cli::kSuccess);
  const auto t = nlohmann::json::parse(slurp(dir / "t" / "quality.json"));
  CHECK(t["stream_size"] == 100);
  CHECK(read_csv(dir / "t" / "stream.csv").rows() == 100);
  fs::remove_all(dir);
}

TEST_CASE("curve writes csv and transition report") {
  const fs::path dir = scratch_dir("curve");
  REQUIRE(run({"curve", "--n", "600", "--schedule", "100:400:100", "--trials", "2", "--out",
               dir.string()}) == cli::kSuccess);
  const std::string csv = slurp(dir / "curve.csv");
  CHECK(csv.find("n,mean_error,sd_error,trials,mode,flag") != std::string::npos);
  const auto rep = nlohmann::json::parse(slurp(dir / "transition.json"));
  CHECK(rep.contains("transition_n"));
  CHECK(rep["window"] == 3);

  // a saved config re-runs to the same numbers
  const fs::path again = dir / "again";
  auto cfg = cli::RunConfig::from_json(slurp(dir / "run_config.json"));
  cfg.out_dir = again.string();
  {
    std::ofstream out(dir / "cfg.json");
    out << cfg.to_json();
  }
  REQUIRE(run({"--config", (dir / "cfg.json").string(), "curve"}) == cli::kSuccess);
  CHECK(slurp(again / "curve.csv") == csv);
  fs::remove_all(dir);
}
