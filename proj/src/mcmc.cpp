#include "spanforest/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace spanforest {

void ChainConfig::validate() const {
  if (iterations < 1)
    throw std::invalid_argument("ChainConfig: iterations < 1");
  if (thin < 1) throw std::invalid_argument("ChainConfig: thin < 1");
  const int b = resolved_burn_in();
  if (b < 0 || b >= iterations)
    throw std::invalid_argument(
        "ChainConfig: burn-in must lie in [0, iterations)");
  if (!(lambda > 0.0)) throw std::invalid_argument("ChainConfig: lambda <= 0");
  if (!(alpha_sigma > 0.0))
    throw std::invalid_argument("ChainConfig: alpha_sigma <= 0");
  if (threads < 1) throw std::invalid_argument("ChainConfig: threads < 1");
}

AugmentedTree sample_tree_cover(const LogSimilarity& s, Rng& rng) {
  const int p = s.size();
  constexpr std::uint64_t kStepBudget = 1000000000ULL;

  // Per-row cumulative transition weights exp(S[i][j] - rowmax), built on
  // first visit; S is fixed for the whole walk.
  std::vector<std::vector<double>> cum(p);
  auto row_cum = [&](int i) -> const std::vector<double>& {
    std::vector<double>& c = cum[i];
    if (c.empty()) {
      double row_max = -std::numeric_limits<double>::infinity();
      for (int j = 0; j < p; ++j)
        if (j != i) row_max = std::max(row_max, s(i, j));
      c.resize(p);
      double acc = 0.0;
      for (int j = 0; j < p; ++j) {
        if (j != i) acc += std::exp(s(i, j) - row_max);
        c[j] = acc;
      }
    }
    return c;
  };

  std::vector<int> parent(p, -1);
  std::vector<char> visited(p, 0);
  visited[0] = 1;
  int remaining = p - 1;
  int at = 0;

  for (std::uint64_t step = 0; remaining > 0; ++step) {
    if (step >= kStepBudget)
      throw std::runtime_error(
          "sample_tree_cover: walk exceeded the step budget; transition "
          "weights are pathological");
    const std::vector<double>& c = row_cum(at);
    const double u = rng.uniform01() * c.back();
    int next = static_cast<int>(
        std::upper_bound(c.begin(), c.end(), u) - c.begin());
    if (next >= p) {
      // u rounded up to the total; take the last positive-weight column.
      next = p - 1;
      while (next == at || c[next] == (next > 0 ? c[next - 1] : 0.0)) --next;
    }
    if (!visited[next]) {
      visited[next] = 1;
      parent[next] = at;
      --remaining;
    }
    at = next;
  }
  return AugmentedTree(std::move(parent));
}

double gibbs_sigma_tilde(int i, const AugmentedTree& tree, const Dataset& data,
                         const ModelState& state, Rng& rng) {
  const int n = data.n();
  if (i < 1 || i > n)
    throw std::invalid_argument("gibbs_sigma_tilde: node out of range");

  // Non-hub tree neighbors of node i: its parent (unless the hub) and its
  // children.
  double chi = 0.0;
  int deg = 0;
  auto absorb = [&](int j) {
    const double d2 =
        (data.values().row(i - 1) - data.values().row(j - 1)).squaredNorm();
    chi += d2 / state.sigma_tilde[j - 1];
    ++deg;
  };
  if (tree.parent(i) >= 1) absorb(tree.parent(i));
  for (int j = 1; j <= n; ++j)
    if (tree.parent(j) == i) absorb(j);

  GigParams params;
  params.psi = 2.0 / data.mu_sigma(i - 1);
  params.chi = chi;
  params.lam = -0.5 * data.p() * deg + state.alpha_sigma;
  return sample_gig(params, rng);
}

double gibbs_u_gamma(int i, const Dataset& data, const ModelState& state,
                     Rng& rng) {
  if (i < 1 || i > data.n())
    throw std::invalid_argument("gibbs_u_gamma: node out of range");
  const double d2 = (data.values().row(i - 1) - state.mu).squaredNorm();
  const double shape = 0.5 * (1.0 + data.p());
  const double scale = 0.5 + d2 / (2.0 * state.gamma2);
  return sample_inverse_gamma(shape, scale, rng);
}

double gibbs_gamma2(const AugmentedTree& tree, const Dataset& data,
                    const ModelState& state, Rng& rng) {
  const std::vector<int> roots = tree.roots();
  const double shape = 2.0 + 0.5 * data.p() * static_cast<double>(roots.size());
  double scale = data.sigma2_hat();
  for (int i : roots) {
    const double d2 = (data.values().row(i - 1) - state.mu).squaredNorm();
    scale += d2 / (2.0 * state.u_gamma[i - 1]);
  }
  return sample_inverse_gamma(shape, scale, rng);
}

std::vector<McmcSample> run_chain(const Dataset& data, const ChainConfig& cfg,
                                  const CovariatePriorConfig* covariates,
                                  Rng& rng) {
  cfg.validate();
  const int n = data.n();

  // Squared pairwise distances and distances to the fixed center, computed
  // once; every sweep's S rebuild reuses them.
  Eigen::MatrixXd dist2(n, n);
  for (int i = 0; i < n; ++i) {
    dist2(i, i) = 0.0;
    for (int j = i + 1; j < n; ++j) {
      const double d2 =
          (data.values().row(i) - data.values().row(j)).squaredNorm();
      dist2(i, j) = d2;
      dist2(j, i) = d2;
    }
  }
  const Eigen::VectorXd mu_dist2 =
      (data.values().rowwise() - data.mean()).rowwise().squaredNorm();

  // The covariate adjustment does not depend on the chain state, so it is
  // assembled a single time.
  Eigen::MatrixXd cov_adjust;
  if (covariates != nullptr) {
    if (covariates->x.rows() != n)
      throw std::invalid_argument(
          "run_chain: covariate rows do not match data rows");
    const Eigen::MatrixXd f0 = covariate_log_f0(*covariates);
    const Eigen::VectorXd r0 = covariate_log_r0(*covariates);
    cov_adjust = Eigen::MatrixXd::Zero(n + 1, n + 1);
    for (int i = 1; i <= n; ++i) {
      cov_adjust(0, i) = r0[i - 1];
      cov_adjust(i, 0) = r0[i - 1];
      for (int j = 1; j <= n; ++j)
        if (j != i) cov_adjust(i, j) = f0(i - 1, j - 1);
    }
  }

  ModelState state = initial_state(data, cfg.lambda, cfg.alpha_sigma);

  const int burn_in = cfg.resolved_burn_in();
  std::vector<McmcSample> samples;
  samples.reserve(static_cast<std::size_t>(
      (cfg.iterations - burn_in + cfg.thin - 1) / cfg.thin));

  for (int t = 1; t <= cfg.iterations; ++t) {
    LogSimilarity s =
        build_S_from_dist(dist2, mu_dist2, state, data.p(), cfg.threads);
    if (covariates != nullptr)
      s = LogSimilarity(s.matrix() + cov_adjust);

    const AugmentedTree tree = sample_tree_cover(s, rng);

    for (int i = 1; i <= n; ++i)
      state.sigma_tilde[i - 1] = gibbs_sigma_tilde(i, tree, data, state, rng);

    state.u_gamma.setOnes();
    for (int i : tree.roots())
      state.u_gamma[i - 1] = gibbs_u_gamma(i, data, state, rng);

    state.gamma2 = gibbs_gamma2(tree, data, state, rng);

    if (t > burn_in && (t - burn_in - 1) % cfg.thin == 0)
      samples.push_back({tree, state.sigma_tilde, state.gamma2, t});
  }
  return samples;
}

std::vector<McmcSample> run_chain(const Dataset& data, const ChainConfig& cfg) {
  Rng rng(cfg.seed);
  return run_chain(data, cfg, nullptr, rng);
}

std::vector<McmcSample> run_chain(const Dataset& data, const ChainConfig& cfg,
                                  const CovariatePriorConfig& covariates) {
  Rng rng(cfg.seed);
  return run_chain(data, cfg, &covariates, rng);
}

}  // namespace spanforest
