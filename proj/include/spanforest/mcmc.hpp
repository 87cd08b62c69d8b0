#pragma once
// The Gibbs sampler: random-walk-covering tree draws alternating with
// conjugate updates of the per-point scales sigma_tilde, the root scale
// mixers u_gamma, and the root dispersion gamma2.

#include <cstdint>
#include <vector>

#include "spanforest/core.hpp"
#include "spanforest/densities.hpp"
#include "spanforest/randkit.hpp"

namespace spanforest {

struct ChainConfig {
  int iterations = 1000;
  // Negative means "use iterations/2" (discard the first half).
  int burn_in = -1;
  int thin = 1;
  std::uint64_t seed = 1;
  double lambda = 0.5;
  double alpha_sigma = 0.5;
  // Worker threads for the S rebuild; output is identical for any value.
  int threads = 1;

  int resolved_burn_in() const { return burn_in < 0 ? iterations / 2 : burn_in; }
  void validate() const;
};

struct McmcSample {
  AugmentedTree tree;
  Eigen::VectorXd sigma_tilde;
  double gamma2 = 0.0;
  int iteration = 0;
};

// Random-walk covering sampler: start at the hub, walk with
// Pr(j | i) = exp(S[i][j]) / sum_{j != i} exp(S[i][j]) (log-sum-exp
// normalized), record each first-entry edge until all n+1 nodes are
// visited. The returned tree is distributed proportionally to
// prod_{(i,j) in T} exp(S[i][j]). Throws std::runtime_error if the walk
// exceeds 1e9 steps (pathological weights).
AugmentedTree sample_tree_cover(const LogSimilarity& s, Rng& rng);

// One draw of sigma_tilde for tree node i (1..n) from its GIG full
// conditional
//   GIG{ psi = 2/mu_sigma(i), chi = sum_{j>=1 tree-neighbors} ||yi-yj||^2 / sigma_tilde_j,
//        lam = -p deg_i/2 + alpha_sigma }
// where deg_i counts non-hub neighbors; deg_i = 0 reduces to the Gamma prior.
double gibbs_sigma_tilde(int i, const AugmentedTree& tree, const Dataset& data,
                         const ModelState& state, Rng& rng);

// One draw of u_gamma for root node i:
// Inverse-Gamma((1+p)/2, 1/2 + ||yi - mu||^2 / (2 gamma2)).
double gibbs_u_gamma(int i, const Dataset& data, const ModelState& state,
                     Rng& rng);

// One draw of gamma2 given current root u's:
// Inverse-Gamma(2 + K p/2, sigma2_hat + sum_roots ||yi - mu||^2 / (2 u_i)).
double gibbs_gamma2(const AugmentedTree& tree, const Dataset& data,
                    const ModelState& state, Rng& rng);

// Full chain. Initialization: sigma_tilde = alpha_sigma * mu_sigma (prior
// mean), gamma2 = sigma2_hat, u_gamma = 1, mu fixed at the column means.
// Each sweep rebuilds S (plus the optional covariate adjustment, computed
// once since it does not depend on the state), draws the tree, updates
// sigma_tilde in ascending node order, refreshes u_gamma at the new tree's
// roots (non-roots reset to 1), then draws gamma2. Samples are retained
// post-burn-in at the thinning stride.
std::vector<McmcSample> run_chain(const Dataset& data, const ChainConfig& cfg,
                                  const CovariatePriorConfig* covariates,
                                  Rng& rng);

// Convenience overloads seeding the generator from cfg.seed.
std::vector<McmcSample> run_chain(const Dataset& data, const ChainConfig& cfg);
std::vector<McmcSample> run_chain(const Dataset& data, const ChainConfig& cfg,
                                  const CovariatePriorConfig& covariates);

}  // namespace spanforest
