#pragma once
// Weighted matrix-tree analytics: log spanning-tree totals, closed-form
// marginal edge probabilities, brute-force enumeration oracles, and the
// eigenvector-agreement experiment comparing the marginal matrix M with
// the normalized Laplacian.

#include <Eigen/Dense>

#include <cstdint>
#include <utility>
#include <vector>

#include "spanforest/core.hpp"
#include "spanforest/randkit.hpp"

namespace spanforest {

// Marginal probability that each edge appears in the random spanning tree
// with weights exp(S). Symmetric, zero diagonal, entries in [0,1]; the sum
// over undirected pairs equals n (a spanning tree on n+1 nodes has n edges).
struct EdgeMarginals {
  Eigen::MatrixXd m;
};

// log sum_T prod_{(i,j) in T} exp(S[i][j]) over all spanning trees of the
// complete graph on the n+1 nodes, via the shifted-Laplacian determinant
// identity  sum_T w(T) = |L + J/p^2|  (p = n+1, J the all-ones matrix),
// computed by Cholesky with a global max-shift on S tracked exactly.
double count_weighted_trees_log(const LogSimilarity& s);

// Closed form M_ij = (Omega_ii + Omega_jj - 2 Omega_ij) A_ij with
// Omega = (L + J/p^2)^(-1); invariant to the global weight shift.
EdgeMarginals edge_marginals(const LogSimilarity& s);

// Every spanning tree of the complete graph on the n+1 nodes (hub-rooted
// parent form) with its log weight sum_{(i,j) in T} S[i][j]. Count equals
// (n+1)^(n-1). Test oracle; guarded to n+1 <= 8.
std::vector<std::pair<AugmentedTree, double>> enumerate_trees(
    const LogSimilarity& s);

// min over orthonormal R of ||U - V R||_F for two m x K orthonormal bases,
// which equals sqrt(2K - 2 sum of singular values of V^T U).
double procrustes_distance(const Eigen::MatrixXd& u, const Eigen::MatrixXd& v);

// One row of the eigenvector-agreement experiment output.
struct EigencheckRow {
  int n = 0;
  int replicate = 0;
  double distance = 0.0;
};

// For each n in the grid and each replicate: draw a three-component
// Gaussian mixture in R^2 (means (0,0), (2,2), (4,4), identity
// covariances), fit the forest model, rebuild S at the posterior-mean
// scales, and record the Procrustes distance between the top-5
// eigenvectors of the marginal matrix M and of -N (N the normalized
// Laplacian of exp(S)). Replicates use independent streams derived from
// the generator, so the output is identical for every thread count.
std::vector<EigencheckRow> eigencheck_experiment(const std::vector<int>& n_grid,
                                                 int replicates, Rng& rng,
                                                 int threads = 1);

}  // namespace spanforest
