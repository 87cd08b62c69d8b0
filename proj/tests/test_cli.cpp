// End-to-end tests of the command-line binary (path injected at compile
// time). Each case runs subcommands against scratch directories and
// inspects the emitted artifacts with the library loaders.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "spanforest/core.hpp"
#include "spanforest/io.hpp"

using namespace spanforest;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() /
          ("spanforest_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string path(const std::string& name) const {
    return (dir / name).string();
  }
};

Scratch& scratch() {
  static Scratch s;
  return s;
}

// Exit code of the CLI with the given argument string.
int run_cli(const std::string& args, const std::string& redirect = "") {
  std::string cmd = std::string(SPANFOREST_CLI_PATH) + " " + args;
  cmd += redirect.empty() ? " >/dev/null 2>&1" : " >/dev/null 2>" + redirect;
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -2;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(bool(in));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json load_json(const std::string& path) { return json::parse(slurp(path)); }

}  // namespace

TEST_CASE("generate rings writes a 300x2 dataset with balanced truth") {
  const std::string out = scratch().path("rings");
  REQUIRE(run_cli("generate --kind rings --seed 3 --out " + out) == 0);

  Eigen::MatrixXd data = io::load_matrix_csv(out + "/data.csv");
  CHECK(data.rows() == 300);
  CHECK(data.cols() == 2);
  Partition truth = io::load_labels_csv(out + "/truth.csv");
  CHECK(truth.K() == 3);
  CHECK(truth.sizes() == std::vector<int>{100, 100, 100});

  json cfg = load_json(out + "/run_config.json");
  CHECK(cfg["command"] == "generate");
  CHECK(cfg["kind"] == "rings");
  CHECK(cfg["seed"] == 3);
  CHECK(cfg["radii"] == json::array({0.2, 1.0, 2.0}));
}

TEST_CASE("SPANFOREST_SEED env var is the fallback seed") {
  const std::string flagged = scratch().path("seed_flag");
  const std::string env = scratch().path("seed_env");
  REQUIRE(run_cli("generate --kind gauss_mix --n 40 --seed 11 --out " +
                  flagged) == 0);
  const std::string cmd = "SPANFOREST_SEED=11 " + std::string(SPANFOREST_CLI_PATH) +
                          " generate --kind gauss_mix --n 40 --out " + env +
                          " >/dev/null 2>&1";
  REQUIRE(std::system(cmd.c_str()) == 0);
  CHECK(slurp(flagged + "/data.csv") == slurp(env + "/data.csv"));
}

TEST_CASE("fit emits schema-valid artifacts") {
  const std::string data_dir = scratch().path("fit_data");
  REQUIRE(run_cli("generate --kind gauss_mix --n 30 --b 6 --seed 5 --out " +
                  data_dir) == 0);

  const std::string out = scratch().path("fit_out");
  REQUIRE(run_cli("fit --input " + data_dir + "/data.csv" +
                  " --iterations 40 --burn-in 20 --seed 7 --out " + out) == 0);

  // samples.jsonl: iterations 21..40, one record each, valid trees.
  std::vector<McmcSample> samples =
      io::load_samples_jsonl(out + "/samples.jsonl");
  REQUIRE(samples.size() == 20);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    CHECK(samples[i].iteration == 21 + static_cast<int>(i));
    CHECK(samples[i].tree.n() == 30);
    CHECK(samples[i].gamma2 > 0.0);
    CHECK(samples[i].sigma_tilde.minCoeff() > 0.0);
  }

  // psm.csv: square, symmetric, unit diagonal, entries in [0,1].
  Eigen::MatrixXd psm = io::load_matrix_csv(out + "/psm.csv");
  REQUIRE(psm.rows() == 30);
  REQUIRE(psm.cols() == 30);
  CHECK((psm - psm.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(psm.diagonal().minCoeff() == 1.0);
  CHECK(psm.minCoeff() >= 0.0);
  CHECK(psm.maxCoeff() <= 1.0);

  // k_hist.json: counts sum to the number of retained samples.
  json hist = load_json(out + "/k_hist.json");
  CHECK(hist["samples"] == 20);
  int total = 0;
  for (const auto& [k, c] : hist["counts"].items()) {
    CHECK(std::stoi(k) >= 1);
    total += c.get<int>();
  }
  CHECK(total == 20);
  CHECK(hist["k_mode"].get<int>() >= 1);

  // labels.csv: one label per row.
  Partition labels = io::load_labels_csv(out + "/labels.csv");
  CHECK(labels.n() == 30);

  json cfg = load_json(out + "/run_config.json");
  CHECK(cfg["command"] == "fit");
  CHECK(cfg["iterations"] == 40);
  CHECK(cfg["resolved_burn_in"] == 20);
  CHECK(cfg["k"].is_null());
  CHECK(cfg["covariates"].is_null());
}

TEST_CASE("fit is byte-deterministic in the seed") {
  const std::string data_dir = scratch().path("det_data");
  REQUIRE(run_cli("generate --kind gauss_mix --n 15 --b 5 --seed 9 --out " +
                  data_dir) == 0);
  const std::string input = data_dir + "/data.csv";

  const std::string a = scratch().path("det_a");
  const std::string b = scratch().path("det_b");
  const std::string c = scratch().path("det_c");
  REQUIRE(run_cli("fit --input " + input +
                  " --iterations 30 --seed 21 --out " + a) == 0);
  REQUIRE(run_cli("fit --input " + input +
                  " --iterations 30 --seed 21 --out " + b) == 0);
  REQUIRE(run_cli("fit --input " + input +
                  " --iterations 30 --seed 22 --out " + c) == 0);
  CHECK(slurp(a + "/samples.jsonl") == slurp(b + "/samples.jsonl"));
  CHECK(slurp(a + "/labels.csv") == slurp(b + "/labels.csv"));
  CHECK(slurp(a + "/samples.jsonl") != slurp(c + "/samples.jsonl"));
}

TEST_CASE("summarize reproduces the fit summaries from samples.jsonl") {
  const std::string data_dir = scratch().path("sum_data");
  REQUIRE(run_cli("generate --kind gauss_mix --n 20 --b 6 --seed 13 --out " +
                  data_dir) == 0);
  const std::string fit_out = scratch().path("sum_fit");
  REQUIRE(run_cli("fit --input " + data_dir + "/data.csv" +
                  " --iterations 30 --seed 17 --out " + fit_out) == 0);

  const std::string sum_out = scratch().path("sum_redo");
  REQUIRE(run_cli("summarize --input " + fit_out + "/samples.jsonl" +
                  " --seed 17 --out " + sum_out) == 0);
  CHECK(slurp(fit_out + "/psm.csv") == slurp(sum_out + "/psm.csv"));
  CHECK(slurp(fit_out + "/k_hist.json") == slurp(sum_out + "/k_hist.json"));
  CHECK(slurp(fit_out + "/labels.csv") == slurp(sum_out + "/labels.csv"));
}

TEST_CASE("fit honors the K override for the point estimate") {
  const std::string data_dir = scratch().path("k_data");
  REQUIRE(run_cli("generate --kind gauss_mix --n 16 --b 8 --seed 19 --out " +
                  data_dir) == 0);
  const std::string out = scratch().path("k_out");
  REQUIRE(run_cli("fit --input " + data_dir + "/data.csv" +
                  " --iterations 30 --seed 23 --k 1 --out " + out) == 0);
  Partition labels = io::load_labels_csv(out + "/labels.csv");
  CHECK(labels.K() == 1);
  json cfg = load_json(out + "/run_config.json");
  CHECK(cfg["k"] == 1);
}

TEST_CASE("baseline cuts the longest MST edges") {
  const std::string dir = scratch().path("base");
  fs::create_directories(dir);
  {
    std::ofstream out(dir + "/data.csv");
    out << "0\n1\n2\n10\n";
  }
  REQUIRE(run_cli("baseline --input " + dir + "/data.csv --k 2 --out " + dir) ==
          0);
  Partition labels = io::load_labels_csv(dir + "/labels.csv");
  CHECK(labels.labels() == std::vector<int>{1, 1, 1, 2});

  json summary = load_json(dir + "/summary.json");
  CHECK(summary["n"] == 4);
  CHECK(summary["k"] == 2);
  CHECK(summary["cluster_sizes"] == json::array({3, 1}));
  CHECK(summary["cut_lengths"] == json::array({8.0}));
  CHECK(summary["mst_total_length"] == 10.0);

  // Fraction variant: floor(0.5 * 3) = 1 edge removed.
  const std::string frac = scratch().path("base_frac");
  REQUIRE(run_cli("baseline --input " + dir + "/data.csv --cut-fraction 0.5" +
                  " --out " + frac) == 0);
  CHECK(io::load_labels_csv(frac + "/labels.csv").K() == 2);

  // --k and --cut-fraction are mutually exclusive, and one is required.
  CHECK(run_cli("baseline --input " + dir + "/data.csv --k 2" +
                " --cut-fraction 0.5 --out " + frac) != 0);
  CHECK(run_cli("baseline --input " + dir + "/data.csv --out " + frac) != 0);
}

TEST_CASE("eigencheck writes one csv row per (n, replicate)") {
  const std::string out = scratch().path("eig");
  REQUIRE(run_cli("eigencheck --n-grid 10 --replicates 2 --seed 29 --out " +
                  out) == 0);
  CHECK(slurp(out + "/eigencheck.csv").rfind("n,replicate,distance\n", 0) == 0);
  Eigen::MatrixXd rows =
      io::load_matrix_csv(out + "/eigencheck.csv", /*skip_header=*/true);
  REQUIRE(rows.rows() == 2);
  REQUIRE(rows.cols() == 3);
  CHECK(rows(0, 0) == 10.0);
  CHECK(rows(1, 1) == 1.0);  // replicates numbered 0,1
  CHECK(rows.col(2).minCoeff() >= 0.0);

  json cfg = load_json(out + "/run_config.json");
  CHECK(cfg["command"] == "eigencheck");
  CHECK(cfg["n_grid"] == json::array({10}));
}

TEST_CASE("summarize on a truncated samples file fails with the line number") {
  const std::string dir = scratch().path("trunc");
  fs::create_directories(dir);
  const std::string samples = dir + "/samples.jsonl";
  {
    std::ofstream out(samples);
    out << R"({"iteration":1,"parent":[-1,0,1],"sigma_tilde":[1.0,2.0],"gamma2":0.5})"
        << "\n";
    out << R"({"iteration":2,"parent":[-1,0,)" << "\n";
  }
  const std::string errfile = dir + "/stderr.txt";
  CHECK(run_cli("summarize --input " + samples + " --out " + dir, errfile) !=
        0);
  const std::string err = slurp(errfile);
  CHECK(err.find(":2:") != std::string::npos);
}

TEST_CASE("bad invocations exit nonzero") {
  CHECK(run_cli("fit") != 0);                        // missing --input
  CHECK(run_cli("no_such_command") != 0);
  CHECK(run_cli("generate --kind nope --out " + scratch().path("x")) != 0);
  CHECK(run_cli("fit --input /nonexistent.csv --out " + scratch().path("y")) !=
        0);
}
