#pragma once
// Posterior summarization: co-assignment (posterior similarity) matrix,
// the posterior distribution of the cluster count, spectral point
// estimates, and Hungarian-matched accuracy.

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <vector>

#include "spanforest/core.hpp"
#include "spanforest/mcmc.hpp"
#include "spanforest/randkit.hpp"

namespace spanforest {

// Streaming accumulator for the co-assignment matrix and the K histogram;
// lets the CLI summarize arbitrarily long sample files one line at a time.
class CoassignmentAccumulator {
 public:
  explicit CoassignmentAccumulator(int n);

  void add(const Partition& partition);
  int count() const { return count_; }
  const std::map<int, int>& k_counts() const { return k_counts_; }
  // Fraction of added partitions placing each pair together; diagonal 1.
  Eigen::MatrixXd psm() const;
  // Modal K; ties resolved toward the smaller K.
  int k_mode() const;

 private:
  Eigen::MatrixXd together_;
  std::map<int, int> k_counts_;
  int count_ = 0;
};

// psm[i][j] = fraction of samples whose tree places rows i and j in the
// same cluster. Throws on an empty sample list.
Eigen::MatrixXd coassignment(const std::vector<McmcSample>& samples);

// Posterior-mode cluster count over retained samples; ties -> smaller K.
int k_mode(const std::vector<McmcSample>& samples);

// Spectral point estimate on the co-assignment matrix: the diagonal is
// zeroed (similarity matrices require it) and spectral_cluster runs with
// k_hat clusters. Rows with zero off-diagonal mass (points never
// co-assigned with any other) are split off as forced singletons and the
// remainder is clustered with correspondingly reduced K, floored at 1.
Partition point_estimate(const Eigen::MatrixXd& psm, int k_hat, Rng& rng);

// Accuracy after optimally matching estimated labels to the truth on the
// K_est x K_true contingency table (rectangular case padded with zeros),
// solved by the O(K^3) Hungarian method: (n - Hamming distance)/n.
double hungarian_accuracy(const Partition& estimate, const Partition& truth);

struct PosteriorSummary {
  Eigen::MatrixXd psm;
  std::map<int, int> k_hist;
  int k_mode = 0;
  Partition point_estimate;
};

// Full summary of a sample list; k_override replaces the posterior-mode K
// for the point estimate when present.
PosteriorSummary summarize(const std::vector<McmcSample>& samples,
                           std::optional<int> k_override, Rng& rng);

}  // namespace spanforest
