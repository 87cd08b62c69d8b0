// Command-line front end: generate | fit | summarize | baseline | eigencheck.
// Every run writes a run_config.json with the effective settings, so any
// artifact can be reproduced exactly from its output directory.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "spanforest/baselines.hpp"
#include "spanforest/core.hpp"
#include "spanforest/datagen.hpp"
#include "spanforest/densities.hpp"
#include "spanforest/io.hpp"
#include "spanforest/matrixtree.hpp"
#include "spanforest/mcmc.hpp"
#include "spanforest/posterior.hpp"
#include "spanforest/randkit.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace spanforest;

namespace {

struct FitArgs {
  std::string input;
  std::string out = ".";
  std::uint64_t seed = 1;
  int iterations = 1000;
  int burn_in = -1;
  int thin = 1;
  double lambda = 0.5;
  double alpha_sigma = 0.5;
  int k = 0;  // 0 = use the posterior mode
  std::string covariates;
  double eta = 1.0;
  int threads = 1;
  bool skip_header = false;
};

struct GenerateArgs {
  std::string out = ".";
  std::uint64_t seed = 1;
  std::string kind = "rings";
  int n_per_ring = 100;
  std::vector<double> radii = {0.2, 1.0, 2.0};
  double noise_sd = 0.05;
  int n = 400;
  double b = 4.0;
  double df = 5.0;
};

struct SummarizeArgs {
  std::string input;
  std::string out = ".";
  std::uint64_t seed = 1;
  int k = 0;
};

struct BaselineArgs {
  std::string input;
  std::string out = ".";
  int k = 0;
  double cut_fraction = -1.0;
  bool skip_header = false;
};

struct EigencheckArgs {
  std::string out = ".";
  std::uint64_t seed = 1;
  std::vector<int> n_grid = {10, 25, 50, 100, 200};
  int replicates = 30;
  int threads = 1;
};

std::string out_path(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  return (fs::path(dir) / name).string();
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("failed writing " + path);
}

// psm.csv + k_hist.json + labels.csv from an accumulated summary.
void write_summary_artifacts(const std::string& out, const Eigen::MatrixXd& psm,
                             const std::map<int, int>& k_hist, int k_mode,
                             const Partition& labels) {
  io::save_matrix_csv(out_path(out, "psm.csv"), psm);
  json counts = json::object();
  int total = 0;
  for (const auto& [k, c] : k_hist) {
    counts[std::to_string(k)] = c;
    total += c;
  }
  write_json_file(out_path(out, "k_hist.json"),
                  json{{"counts", counts}, {"k_mode", k_mode},
                       {"samples", total}});
  io::save_labels_csv(out_path(out, "labels.csv"), labels);
}

int run_fit(const FitArgs& a) {
  Dataset data(io::load_matrix_csv(a.input, a.skip_header));

  ChainConfig cfg;
  cfg.iterations = a.iterations;
  cfg.burn_in = a.burn_in;
  cfg.thin = a.thin;
  cfg.seed = a.seed;
  cfg.lambda = a.lambda;
  cfg.alpha_sigma = a.alpha_sigma;
  cfg.threads = a.threads;

  std::vector<McmcSample> samples;
  if (a.covariates.empty()) {
    samples = run_chain(data, cfg);
  } else {
    Eigen::MatrixXd x = io::load_matrix_csv(a.covariates, a.skip_header);
    if (x.rows() != data.n())
      throw std::runtime_error("covariate rows (" + std::to_string(x.rows()) +
                               ") do not match data rows (" +
                               std::to_string(data.n()) + ")");
    samples = run_chain(data, cfg, make_covariate_prior(x, a.eta));
  }
  io::save_samples_jsonl(out_path(a.out, "samples.jsonl"), samples);

  // Stream 1 so the summary draws are independent of the chain's stream.
  Rng rng = Rng::for_stream(a.seed, 1);
  std::optional<int> k_override;
  if (a.k > 0) k_override = a.k;
  PosteriorSummary summary = summarize(samples, k_override, rng);
  write_summary_artifacts(a.out, summary.psm, summary.k_hist, summary.k_mode,
                          summary.point_estimate);

  json cfg_json{{"command", "fit"},
                {"input", a.input},
                {"out", a.out},
                {"seed", a.seed},
                {"iterations", a.iterations},
                {"burn_in", a.burn_in},
                {"resolved_burn_in", cfg.resolved_burn_in()},
                {"thin", a.thin},
                {"lambda", a.lambda},
                {"alpha_sigma", a.alpha_sigma},
                {"threads", a.threads},
                {"skip_header", a.skip_header}};
  cfg_json["k"] = a.k > 0 ? json(a.k) : json(nullptr);
  cfg_json["covariates"] =
      a.covariates.empty() ? json(nullptr) : json(a.covariates);
  if (!a.covariates.empty()) cfg_json["eta"] = a.eta;
  write_json_file(out_path(a.out, "run_config.json"), cfg_json);

  std::cout << "fit: " << samples.size() << " samples, posterior-mode K = "
            << summary.k_mode << ", artifacts in " << a.out << '\n';
  return 0;
}

int run_generate(const GenerateArgs& a) {
  GenSpec spec;
  if (a.kind == "rings") {
    spec.kind = GenSpec::Kind::rings;
  } else if (a.kind == "gauss_mix") {
    spec.kind = GenSpec::Kind::gauss_mix;
  } else {
    spec.kind = GenSpec::Kind::t_mix;
  }
  spec.n_per_ring = a.n_per_ring;
  spec.radii = a.radii;
  spec.noise_sd = a.noise_sd;
  spec.n = a.n;
  spec.b = a.b;
  spec.df = a.df;

  Rng rng(a.seed);
  GeneratedData g = generate(spec, rng);
  io::save_matrix_csv(out_path(a.out, "data.csv"), g.data.values());
  io::save_labels_csv(out_path(a.out, "truth.csv"), g.truth);

  json cfg_json{{"command", "generate"}, {"out", a.out}, {"seed", a.seed},
                {"kind", a.kind}};
  if (spec.kind == GenSpec::Kind::rings) {
    cfg_json["n_per_ring"] = a.n_per_ring;
    cfg_json["radii"] = a.radii;
    cfg_json["noise_sd"] = a.noise_sd;
  } else {
    cfg_json["n"] = a.n;
    cfg_json["b"] = a.b;
    if (spec.kind == GenSpec::Kind::t_mix) cfg_json["df"] = a.df;
  }
  write_json_file(out_path(a.out, "run_config.json"), cfg_json);

  std::cout << "generate: " << g.data.n() << " x " << g.data.p()
            << " data.csv + truth.csv in " << a.out << '\n';
  return 0;
}

int run_summarize(const SummarizeArgs& a) {
  std::optional<CoassignmentAccumulator> acc;
  io::for_each_sample_jsonl(a.input, [&acc](const McmcSample& smp) {
    if (!acc) acc.emplace(smp.tree.n());
    acc->add(partition_from_tree(smp.tree));
  });

  const Eigen::MatrixXd psm = acc->psm();
  const int k_hat = a.k > 0 ? a.k : acc->k_mode();
  Rng rng = Rng::for_stream(a.seed, 1);
  Partition labels = point_estimate(psm, k_hat, rng);
  write_summary_artifacts(a.out, psm, acc->k_counts(), acc->k_mode(), labels);

  json cfg_json{{"command", "summarize"},
                {"input", a.input},
                {"out", a.out},
                {"seed", a.seed}};
  cfg_json["k"] = a.k > 0 ? json(a.k) : json(nullptr);
  write_json_file(out_path(a.out, "run_config.json"), cfg_json);

  std::cout << "summarize: " << acc->count() << " samples, posterior-mode K = "
            << acc->k_mode() << ", artifacts in " << a.out << '\n';
  return 0;
}

int run_baseline(const BaselineArgs& a) {
  if ((a.k > 0) == (a.cut_fraction >= 0.0))
    throw std::runtime_error("baseline: pass exactly one of --k or --cut-fraction");

  Dataset data(io::load_matrix_csv(a.input, a.skip_header));
  WeightedTree tree = mst(data);
  Partition labels = a.k > 0 ? mst_cut(tree, a.k)
                             : mst_cut_fraction(tree, a.cut_fraction);
  io::save_labels_csv(out_path(a.out, "labels.csv"), labels);

  // Lengths of the removed edges: the longest ones, ties toward the
  // earlier insertion index, exactly as the partitioner removes them.
  const int removed = labels.K() - 1;
  std::vector<int> order(tree.edges.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&tree](int x, int y) {
    return tree.lengths[x] > tree.lengths[y];
  });
  std::vector<double> cut_lengths;
  for (int r = 0; r < removed; ++r) cut_lengths.push_back(tree.lengths[order[r]]);

  json summary{{"n", data.n()},
               {"k", labels.K()},
               {"cluster_sizes", labels.sizes()},
               {"cut_lengths", cut_lengths},
               {"mst_total_length",
                std::accumulate(tree.lengths.begin(), tree.lengths.end(), 0.0)}};
  write_json_file(out_path(a.out, "summary.json"), summary);

  json cfg_json{{"command", "baseline"},
                {"input", a.input},
                {"out", a.out},
                {"skip_header", a.skip_header}};
  cfg_json["k"] = a.k > 0 ? json(a.k) : json(nullptr);
  cfg_json["cut_fraction"] =
      a.cut_fraction >= 0.0 ? json(a.cut_fraction) : json(nullptr);
  write_json_file(out_path(a.out, "run_config.json"), cfg_json);

  std::cout << "baseline: K = " << labels.K() << ", artifacts in " << a.out
            << '\n';
  return 0;
}

int run_eigencheck(const EigencheckArgs& a) {
  Rng rng(a.seed);
  const std::vector<EigencheckRow> rows =
      eigencheck_experiment(a.n_grid, a.replicates, rng, a.threads);

  const std::string csv = out_path(a.out, "eigencheck.csv");
  std::ofstream out(csv);
  if (!out) throw std::runtime_error("cannot open " + csv + " for writing");
  out << "n,replicate,distance\n";
  for (const EigencheckRow& row : rows)
    out << row.n << ',' << row.replicate << ','
        << io::format_double(row.distance) << '\n';
  if (!out) throw std::runtime_error("failed writing " + csv);

  write_json_file(out_path(a.out, "run_config.json"),
                  json{{"command", "eigencheck"},
                       {"out", a.out},
                       {"seed", a.seed},
                       {"n_grid", a.n_grid},
                       {"replicates", a.replicates},
                       {"threads", a.threads}});

  std::cout << "eigencheck: " << rows.size() << " rows in " << csv << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian spanning-forest clustering"};
  app.require_subcommand(1);

  FitArgs fit_args;
  CLI::App* fit = app.add_subcommand(
      "fit", "Run the Gibbs sampler on a data CSV and summarize the posterior");
  fit->add_option("--input", fit_args.input, "Data CSV, one row per point")
      ->required();
  fit->add_option("--out", fit_args.out, "Output directory");
  fit->add_option("--seed", fit_args.seed, "RNG seed")
      ->envname("SPANFOREST_SEED");
  fit->add_option("--iterations", fit_args.iterations, "Gibbs sweeps")
      ->check(CLI::PositiveNumber);
  fit->add_option("--burn-in", fit_args.burn_in,
                  "Discarded sweeps (default: half)");
  fit->add_option("--thin", fit_args.thin, "Keep every thin-th sample")
      ->check(CLI::PositiveNumber);
  fit->add_option("--lambda", fit_args.lambda,
                  "Geometric prior rate on the cluster count");
  fit->add_option("--alpha-sigma", fit_args.alpha_sigma,
                  "Gamma shape of the scale prior");
  fit->add_option("--k", fit_args.k, "Cluster-count override for labels.csv")
      ->check(CLI::PositiveNumber);
  fit->add_option("--covariates", fit_args.covariates,
                  "Covariate CSV, row-aligned with --input");
  fit->add_option("--eta", fit_args.eta,
                  "Covariate kernel width multiplier (larger = weaker)");
  fit->add_option("--threads", fit_args.threads,
                  "Worker threads for the similarity rebuild")
      ->check(CLI::PositiveNumber);
  fit->add_flag("--skip-header", fit_args.skip_header,
                "Skip the first CSV line");

  GenerateArgs gen_args;
  CLI::App* gen = app.add_subcommand("generate",
                                     "Write a synthetic dataset + truth labels");
  gen->add_option("--out", gen_args.out, "Output directory");
  gen->add_option("--seed", gen_args.seed, "RNG seed")
      ->envname("SPANFOREST_SEED");
  gen->add_option("--kind", gen_args.kind, "rings | gauss_mix | t_mix")
      ->check(CLI::IsMember({"rings", "gauss_mix", "t_mix"}));
  gen->add_option("--n-per-ring", gen_args.n_per_ring, "Points per ring")
      ->check(CLI::PositiveNumber);
  gen->add_option("--radii", gen_args.radii, "Ring radii");
  gen->add_option("--noise-sd", gen_args.noise_sd, "Ring noise sd");
  gen->add_option("--n", gen_args.n, "Mixture sample size")
      ->check(CLI::PositiveNumber);
  gen->add_option("--b", gen_args.b, "Second component mean offset (b,b)");
  gen->add_option("--df", gen_args.df, "Degrees of freedom for t_mix");

  SummarizeArgs sum_args;
  CLI::App* sum = app.add_subcommand(
      "summarize", "Recompute posterior summaries from a samples.jsonl");
  sum->add_option("--input", sum_args.input, "samples.jsonl path")->required();
  sum->add_option("--out", sum_args.out, "Output directory");
  sum->add_option("--seed", sum_args.seed, "RNG seed for the point estimate")
      ->envname("SPANFOREST_SEED");
  sum->add_option("--k", sum_args.k, "Cluster-count override")
      ->check(CLI::PositiveNumber);

  BaselineArgs base_args;
  CLI::App* base = app.add_subcommand(
      "baseline", "Euclidean MST cut (single-linkage) clustering");
  base->add_option("--input", base_args.input, "Data CSV")->required();
  base->add_option("--out", base_args.out, "Output directory");
  CLI::Option* opt_k =
      base->add_option("--k", base_args.k, "Number of clusters")
          ->check(CLI::PositiveNumber);
  CLI::Option* opt_frac = base->add_option(
      "--cut-fraction", base_args.cut_fraction, "Remove floor(q(n-1)) edges");
  opt_k->excludes(opt_frac);
  opt_frac->excludes(opt_k);
  base->add_flag("--skip-header", base_args.skip_header,
                 "Skip the first CSV line");

  EigencheckArgs eig_args;
  CLI::App* eig = app.add_subcommand(
      "eigencheck",
      "Eigenvector agreement between edge marginals and the spectral relaxation");
  eig->add_option("--out", eig_args.out, "Output directory");
  eig->add_option("--seed", eig_args.seed, "RNG seed")
      ->envname("SPANFOREST_SEED");
  eig->add_option("--n-grid", eig_args.n_grid, "Sample sizes to test");
  eig->add_option("--replicates", eig_args.replicates, "Replicates per n")
      ->check(CLI::PositiveNumber);
  eig->add_option("--threads", eig_args.threads, "Worker threads")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
    if (fit->parsed()) return run_fit(fit_args);
    if (gen->parsed()) return run_generate(gen_args);
    if (sum->parsed()) return run_summarize(sum_args);
    if (base->parsed()) return run_baseline(base_args);
    if (eig->parsed()) return run_eigencheck(eig_args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
