#pragma once
// Core domain types shared by every module: datasets with cached model
// statistics, hub-rooted augmented spanning trees, canonical partitions,
// and the sampler state.
//
// Index conventions used throughout the library:
//   - Tree nodes are 0..n where node 0 is the auxiliary hub; data node i
//     corresponds to dataset row i-1.
//   - Partition labels live in 1..K and are row-aligned with the dataset.

#include <Eigen/Dense>

#include <vector>

namespace spanforest {

// ---------------------------------------------------------------------------
// Dataset
// ---------------------------------------------------------------------------

// An n x p real matrix of observations plus derived statistics the model
// needs: column means, the scale estimate sigma2_hat = sum_i ||y_i - ybar||^2 / (n p),
// and the per-point nearest-distinct-neighbor scale mu_sigma(i) =
// min_{j : y_j != y_i} ||y_i - y_j|| / sqrt(p).
//
// Duplicate rows are allowed; they are skipped when searching for the
// nearest distinct neighbor. Construction fails if all rows are identical
// (mu_sigma would be undefined) or any entry is non-finite.
class Dataset {
 public:
  explicit Dataset(Eigen::MatrixXd values);

  int n() const { return static_cast<int>(values_.rows()); }
  int p() const { return static_cast<int>(values_.cols()); }
  const Eigen::MatrixXd& values() const { return values_; }
  Eigen::RowVectorXd row(int i) const { return values_.row(i); }

  const Eigen::RowVectorXd& mean() const { return mean_; }
  double sigma2_hat() const { return sigma2_hat_; }
  // Nearest-distinct-neighbor distance of row i, divided by sqrt(p).
  double mu_sigma(int i) const { return mu_sigma_[i]; }
  const Eigen::VectorXd& mu_sigma() const { return mu_sigma_; }

 private:
  Eigen::MatrixXd values_;
  Eigen::RowVectorXd mean_;
  double sigma2_hat_ = 0.0;
  Eigen::VectorXd mu_sigma_;
};

// ---------------------------------------------------------------------------
// AugmentedTree
// ---------------------------------------------------------------------------

// A spanning tree on nodes {0..n} stored as a parent array rooted at the
// hub node 0. parent[0] is the sentinel -1; parent[i] in {0..n}\{i} for
// i >= 1. Children of the hub are the cluster roots; deleting the hub
// yields the spanning forest, one tree per cluster.
//
// Edge direction is bookkeeping only: the model's likelihood depends on
// the undirected edge set alone.
class AugmentedTree {
 public:
  // Validates connectivity/acyclicity (every node reaches 0 by following
  // parents); throws std::invalid_argument with a diagnostic otherwise.
  explicit AugmentedTree(std::vector<int> parent);

  int n() const { return static_cast<int>(parent_.size()) - 1; }
  int parent(int i) const { return parent_[i]; }
  const std::vector<int>& parents() const { return parent_; }

  // Number of clusters K = degree of the hub.
  int hub_degree() const;
  // Children of the hub (cluster roots), ascending.
  std::vector<int> roots() const;
  // Neighbor lists over all nodes 0..n (hub included as neighbor id 0).
  std::vector<std::vector<int>> adjacency() const;
  // Undirected edge set as (min,max) pairs, sorted; canonical across
  // different parent orientations of the same tree.
  std::vector<std::pair<int, int>> edges() const;

  bool operator==(const AugmentedTree& other) const {
    return parent_ == other.parent_;
  }

 private:
  std::vector<int> parent_;
};

// Validating constructor exposed as a free function: checks length, ranges,
// and reachability from the hub, returning the tree or throwing.
AugmentedTree validate_tree(const std::vector<int>& parent);

// ---------------------------------------------------------------------------
// Partition
// ---------------------------------------------------------------------------

// Cluster labels for n items, canonicalized so that ids appear in first-
// occurrence order: item 0 always has label 1, the first item not in
// cluster 1 has label 2, and so on. Two Partitions are equal iff they
// induce the same set partition.
class Partition {
 public:
  explicit Partition(std::vector<int> labels);

  int n() const { return static_cast<int>(labels_.size()); }
  int K() const { return k_; }
  // Label of item (dataset row) i, in 1..K.
  int label(int i) const { return labels_[i]; }
  const std::vector<int>& labels() const { return labels_; }
  // Cluster sizes indexed by label-1.
  std::vector<int> sizes() const;

  bool operator==(const Partition& other) const {
    return labels_ == other.labels_;
  }

 private:
  std::vector<int> labels_;
  int k_ = 0;
};

// Connected components of the tree after deleting the hub, canonicalized.
// Item i-1 of the Partition corresponds to tree node i.
Partition partition_from_tree(const AugmentedTree& tree);

// ---------------------------------------------------------------------------
// ModelState
// ---------------------------------------------------------------------------

// Sampler state. sigma_tilde and u_gamma are row-aligned with the dataset
// (entry i-1 belongs to tree node i). The pairwise scale sigma_ij is never
// stored; it is always the product sigma_tilde[i] * sigma_tilde[j].
// u_gamma entries are meaningful only at current roots; non-roots hold the
// placeholder 1.
struct ModelState {
  Eigen::VectorXd sigma_tilde;  // length n, > 0
  double gamma2 = 1.0;          // > 0
  Eigen::RowVectorXd mu;        // length p
  Eigen::VectorXd u_gamma;      // length n, > 0
  double lambda = 0.5;          // > 0, geometric tree-prior weight
  double alpha_sigma = 0.5;     // > 0, Gamma shape of the sigma_tilde prior

  void validate(int n, int p) const;
};

// Prior-mean initialization: sigma_tilde[i] = alpha_sigma * mu_sigma(i),
// gamma2 = sigma2_hat, u_gamma = 1, mu = column means.
ModelState initial_state(const Dataset& data, double lambda = 0.5,
                         double alpha_sigma = 0.5);

// ---------------------------------------------------------------------------
// LogSimilarity
// ---------------------------------------------------------------------------

// The (n+1) x (n+1) log-similarity matrix S with row/column 0 reserved for
// the hub: S[i][j] is the log leaf density between data nodes, and
// S[0][i] = log root density + log lambda. Symmetric with zero diagonal;
// tree log-weights are sums of S over tree edges.
class LogSimilarity {
 public:
  explicit LogSimilarity(Eigen::MatrixXd s);

  // Number of nodes including the hub.
  int size() const { return static_cast<int>(s_.rows()); }
  // Number of data nodes.
  int n() const { return size() - 1; }
  const Eigen::MatrixXd& matrix() const { return s_; }
  double operator()(int i, int j) const { return s_(i, j); }

 private:
  Eigen::MatrixXd s_;
};

}  // namespace spanforest
