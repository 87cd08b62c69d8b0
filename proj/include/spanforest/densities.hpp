#pragma once
// Log densities, the log-similarity matrix S, tree/partition priors, and
// the unnormalized log posterior over trees. All density work happens in
// log space; raw densities are only materialized inside normalized
// transition probabilities (max-shifted exponentiation).

#include <Eigen/Dense>

#include "spanforest/core.hpp"

namespace spanforest {

// Gaussian leaf kernel: -(p/2) log(2 pi sigma_ij) - ||yi - yj||^2 / (2 sigma_ij).
// Symmetric in (yi, yj).
double log_leaf(const Eigen::RowVectorXd& yi, const Eigen::RowVectorXd& yj,
                double sigma_ij);

// Multivariate Cauchy root density:
//   log Gamma((1+p)/2) - p log(gamma) - ((1+p)/2) log(pi)
//   - ((1+p)/2) log(1 + ||yi - mu||^2 / gamma^2),   gamma = sqrt(gamma2).
double log_root(const Eigen::RowVectorXd& yi, const Eigen::RowVectorXd& mu,
                double gamma2);

// Assemble S: S[i][j] = log_leaf(yi, yj, sigma_tilde_i * sigma_tilde_j) for
// data nodes, S[0][i] = log_root(yi, mu, gamma2) + log(lambda), zero diagonal.
LogSimilarity build_S(const Dataset& data, const ModelState& state);

// Internal fast path used by the sampler: same matrix, but squared pairwise
// distances (n x n, data-row indexed) and root-to-mu squared distances are
// precomputed by the caller. threads > 1 splits the row loop; the result is
// identical for every thread count.
LogSimilarity build_S_from_dist(const Eigen::MatrixXd& dist2,
                                const Eigen::VectorXd& mu_dist2,
                                const ModelState& state, int p, int threads = 1);

// Unnormalized log posterior of a tree: the sum of S over the tree's
// undirected edges (the K log(lambda) term enters through the hub rows).
double log_posterior_tree(const AugmentedTree& tree, const LogSimilarity& s);

// CRP-forest prior (exchangeable partition law x uniform tree and root per
// cluster): log[ alpha^K Gamma(alpha)/Gamma(alpha+n) prod_k Gamma(n_k) n_k^-(n_k-1) ].
double crp_forest_log_prior(const AugmentedTree& tree, double alpha);

// Geometric tree prior, unnormalized: K log(lambda). The per-cluster
// cohesion n_k^(n_k-1) cancels the uniform tree/root multiplicity, so only
// the cluster-count term survives.
double geometric_tree_log_prior(const AugmentedTree& tree, double lambda);

// ---------------------------------------------------------------------------
// Covariate-dependent similarity adjustment
// ---------------------------------------------------------------------------

// Configuration for the covariate product-kernel adjustment with
// Sigma1 = Sigma2 = eta * Sn, where Sn is the empirical covariance of the
// covariate rows. eta -> infinity removes the covariate influence.
struct CovariatePriorConfig {
  Eigen::MatrixXd x;   // n x m covariates, row-aligned with the dataset
  double eta = 1.0;    // > 0
  Eigen::MatrixXd sn;  // m x m empirical covariance of the rows of x
};

// Builds the config, computing Sn = (1/n) sum (x_i - xbar)(x_i - xbar)^T.
CovariatePriorConfig make_covariate_prior(const Eigen::MatrixXd& x, double eta);

// Adds the covariate log kernels to S:
//   S'[i][j] = S[i][j] + log f0(xi; xj),
//     log f0 = -1/2 log|2 pi (2 Sigma1)| - (xi-xj)^T (4 Sigma1)^-1 (xi-xj)
//   S'[0][i] = S[0][i] + log r0(xi),
//     log r0 = -1/2 log|2 pi (2 Sigma1)| - xi^T (4 Sigma1)^-1 xi
// with Sigma1 = eta * (Sn + 1e-8 mean(diag(Sn)) I); the ridge guarantees
// invertibility. Throws if Sigma1 is still not positive definite.
LogSimilarity covariate_adjust_S(const LogSimilarity& s,
                                 const CovariatePriorConfig& cfg);

// The two covariate log kernels, exposed for reuse and testing.
// Pairwise matrix of log f0 over data rows (zero diagonal) and the vector
// of log r0 values.
Eigen::MatrixXd covariate_log_f0(const CovariatePriorConfig& cfg);
Eigen::VectorXd covariate_log_r0(const CovariatePriorConfig& cfg);

}  // namespace spanforest
