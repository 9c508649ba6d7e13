#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "pbmin/bounds.hpp"
#include "pbmin/io.hpp"
#include "pbmin/rng.hpp"

using namespace pbmin;
namespace fs = std::filesystem;

namespace {

struct CmdResult {
  int exit_code = -1;
  std::string output;
};

CmdResult run_cli(const std::string& args) {
  const std::string command = std::string(PBMIN_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CmdResult result;
  char buffer[4096];
  while (std::size_t got = std::fread(buffer, 1, sizeof(buffer), pipe))
    result.output.append(buffer, got);
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

double parse_metric(const std::string& output, const std::string& key) {
  std::istringstream in(output);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(key + ",", 0) == 0) return std::stod(line.substr(key.size() + 1));
  }
  FAIL("metric '" << key << "' not found in output:\n" << output);
  return 0.0;
}

std::string drop_line(const std::string& text, const std::string& prefix) {
  std::istringstream in(text);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(prefix, 0) != 0) out << line << '\n';
  return out.str();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("pbmin_cli_" + std::to_string(::getpid()) + "_" +
            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_synthetic_svm(const std::string& path, std::uint64_t seed, int n, int d) {
  RandomStream stream(seed);
  std::ofstream out(path);
  for (int i = 0; i < n; ++i) {
    const bool positive = (stream.next_u64() & 1) != 0;
    out << (positive ? "1" : "-1");
    for (int k = 0; k < d; ++k) {
      double v = stream.next_normal();
      if (k == 0) v += positive ? 0.9 : -0.9;
      out << ' ' << k + 1 << ':' << format_double(v);
    }
    out << '\n';
  }
}

}  // namespace

TEST_CASE("exit codes distinguish usage, data and domain errors") {
  CHECK(run_cli("frobnicate").exit_code == 1);
  CHECK(run_cli("bound").exit_code == 1);                      // missing required flags
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("bound --losses /no/such/file --n-eval 50").exit_code == 2);

  TempDir dir;
  std::ofstream(dir.file("l.txt")) << "0.2\n";
  CHECK(run_cli("bound --losses " + dir.file("l.txt") + " --n-eval 50 --delta 2.0").exit_code ==
        3);
  CHECK(run_cli("bound --losses " + dir.file("l.txt") + " --n-eval 50 --lambda 1.0").exit_code ==
        0);
}

TEST_CASE("bound command reproduces the library numbers exactly") {
  TempDir dir;
  std::ofstream(dir.file("losses.txt")) << "0\n0.5\n";
  const CmdResult fixed =
      run_cli("bound --losses " + dir.file("losses.txt") + " --n-eval 100 --delta 0.01 --lambda 0.5");
  REQUIRE(fixed.exit_code == 0);

  LossProfile profile = LossProfile::with_uniform_prior({0.0, 0.5}, 100);
  BoundConfig cfg(100, 0.01);
  const BoundValue expected =
      pac_bayes_lambda_bound(profile, PosteriorWeights::prior_of(profile), 0.5, cfg);
  CHECK(parse_metric(fixed.output, "pb_lambda_bound") ==
        doctest::Approx(expected.value).epsilon(1e-14));
  CHECK(parse_metric(fixed.output, "pb_lambda_bound") ==
        doctest::Approx(0.536024065588).epsilon(1e-9));
  CHECK(parse_metric(fixed.output, "pb_kl_bound") ==
        doctest::Approx(pac_bayes_kl_bound(profile, PosteriorWeights::prior_of(profile), cfg))
            .epsilon(1e-14));

  // optimized run reports the kl bound as the tighter of the two
  const CmdResult optimized =
      run_cli("bound --losses " + dir.file("losses.txt") + " --n-eval 100 --delta 0.01");
  REQUIRE(optimized.exit_code == 0);
  CHECK(parse_metric(optimized.output, "pb_kl_bound") <=
        parse_metric(optimized.output, "pb_lambda_bound"));
}

TEST_CASE("scan command reports the built-in instances") {
  TempDir dir;
  const CmdResult two = run_cli("scan --example two-minima --grid-size 2000 --out " +
                                dir.file("scan.csv"));
  REQUIRE(two.exit_code == 0);
  CHECK(two.output.find("local_minima=2") != std::string::npos);

  // table: header + 2000 rows
  std::ifstream table(dir.file("scan.csv"));
  std::string line;
  int rows = 0;
  std::getline(table, line);
  CHECK(line == "lambda,bound");
  while (std::getline(table, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 2000);

  const CmdResult one = run_cli("scan --example nonconvex --grid-size 2000");
  REQUIRE(one.exit_code == 0);
  CHECK(one.output.find("local_minima=1") != std::string::npos);
}

TEST_CASE("certify command on a single-hypothesis losses file") {
  TempDir dir;
  std::ofstream(dir.file("one.txt")) << "0.2\n";
  const CmdResult result =
      run_cli("certify --losses " + dir.file("one.txt") + " --n-eval 100 --delta 0.05");
  REQUIRE(result.exit_code == 0);
  CHECK(result.output.find("verdict,certified") != std::string::npos);

  const CmdResult two_minima = run_cli("certify --example two-minima");
  REQUIRE(two_minima.exit_code == 0);
  CHECK(two_minima.output.find("verdict,not_certified") != std::string::npos);
}

TEST_CASE("training is bit-reproducible across runs and thread counts") {
  TempDir dir;
  write_synthetic_svm(dir.file("train.svm"), 11, 120, 4);
  const std::string flags = "train --data " + dir.file("train.svm") +
                            " --m 25 --r 6 --seed 9 --learner kernel_perceptron --gamma grid";

  setenv("PBMIN_THREADS", "1", 1);
  const CmdResult first = run_cli(flags + " --out " + dir.file("a.json"));
  REQUIRE(first.exit_code == 0);
  setenv("PBMIN_THREADS", "4", 1);
  const CmdResult second = run_cli(flags + " --out " + dir.file("b.json"));
  REQUIRE(second.exit_code == 0);
  unsetenv("PBMIN_THREADS");

  CHECK(drop_line(first.output, "model,") == drop_line(second.output, "model,"));
  CHECK(slurp(dir.file("a.json")) == slurp(dir.file("b.json")));
}

TEST_CASE("trained models round-trip through predict deterministically") {
  TempDir dir;
  write_synthetic_svm(dir.file("train.svm"), 12, 150, 3);
  write_synthetic_svm(dir.file("test.svm"), 13, 60, 3);
  const CmdResult train = run_cli("train --data " + dir.file("train.svm") +
                                  " --m 30 --r auto --seed 5 --out " + dir.file("m.json"));
  REQUIRE(train.exit_code == 0);
  CHECK(parse_metric(train.output, "pb_kl_bound") <=
        parse_metric(train.output, "pb_lambda_bound"));
  CHECK(parse_metric(train.output, "r") == 12.0);  // sqrt(150) fallback for low-d data

  for (const std::string mode : {"majority", "uniform", "best_h", "randomized"}) {
    const std::string flags = "predict --model " + dir.file("m.json") + " --data " +
                              dir.file("test.svm") + " --mode " + mode + " --seed 3 --out " +
                              dir.file("p_" + mode + ".csv");
    const CmdResult once = run_cli(flags);
    REQUIRE(once.exit_code == 0);
    const std::string table = slurp(dir.file("p_" + mode + ".csv"));
    const CmdResult twice = run_cli(flags);
    REQUIRE(twice.exit_code == 0);
    CHECK(once.output == twice.output);
    CHECK(table == slurp(dir.file("p_" + mode + ".csv")));
    CHECK(parse_metric(once.output, "test_loss") >= 0.0);
    CHECK(parse_metric(once.output, "test_loss") <= 1.0);
  }
}

TEST_CASE("scan accepts a trained model as its profile source") {
  TempDir dir;
  write_synthetic_svm(dir.file("train.svm"), 14, 100, 3);
  REQUIRE(run_cli("train --data " + dir.file("train.svm") + " --m 15 --r 8 --seed 2 --out " +
                  dir.file("m.json"))
              .exit_code == 0);
  const CmdResult scan =
      run_cli("scan --model " + dir.file("m.json") + " --grid-size 500");
  REQUIRE(scan.exit_code == 0);
  CHECK(scan.output.find("local_minima=") != std::string::npos);
}

TEST_CASE("auto subsample size prefers d+1 when the dimension is large enough") {
  TempDir dir;
  write_synthetic_svm(dir.file("train.svm"), 17, 60, 22);
  const CmdResult result = run_cli("train --data " + dir.file("train.svm") +
                                   " --m 8 --r auto --learner stump --seed 1 --out " +
                                   dir.file("m.json"));
  REQUIRE(result.exit_code == 0);
  CHECK(parse_metric(result.output, "r") == 23.0);  // d+1, no sqrt(n) fallback
}

TEST_CASE("heatmap experiment emits the requested grid shape") {
  TempDir dir;
  write_synthetic_svm(dir.file("train.svm"), 15, 50, 22);
  write_synthetic_svm(dir.file("test.svm"), 16, 40, 22);
  const CmdResult result = run_cli(
      "experiment heatmap --data " + dir.file("train.svm") + " --test " + dir.file("test.svm") +
      " --m-count 20 --r-count 20 --learner stump --seed 4 --out " + dir.file("hm.csv"));
  REQUIRE(result.exit_code == 0);
  CHECK(result.output.find("rows=20 cols=20") != std::string::npos);

  std::ifstream table(dir.file("hm.csv"));
  std::string header;
  std::getline(table, header);
  int columns = 0;
  for (char c : header)
    if (c == ',') ++columns;
  CHECK(columns == 20);
  int rows = 0;
  std::string line;
  while (std::getline(table, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 20);
}

TEST_CASE("validity experiment keeps coverage at desk scale") {
  const CmdResult result =
      run_cli("experiment validity --trials 30 --n 250 --m 8 --r 10 --seed 6");
  REQUIRE(result.exit_code == 0);
  CHECK(parse_metric(result.output, "violations") == 0.0);
  CHECK(parse_metric(result.output, "mean_gap") > 0.0);
}

TEST_CASE("predictor comparison runs on a synthetic task") {
  const CmdResult result = run_cli(
      "experiment predictor_compare --n 300 --test-n 200 --d 4 --m 30 --r 5 --seed 8 "
      "--learner stump");
  REQUIRE(result.exit_code == 0);
  CHECK(parse_metric(result.output, "half_mass_count") >= 1.0);
  CHECK(parse_metric(result.output, "majority_loss") <= 1.0);
  CHECK(parse_metric(result.output, "pb_kl_bound") <=
        parse_metric(result.output, "pb_lambda_bound"));
}
