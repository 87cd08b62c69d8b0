#include "spanforest/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace spanforest {

// ---------------------------------------------------------------------------
// Dataset
// ---------------------------------------------------------------------------

Dataset::Dataset(Eigen::MatrixXd values) : values_(std::move(values)) {
  const int n = this->n();
  const int p = this->p();
  if (n < 2) throw std::invalid_argument("Dataset: need at least 2 rows");
  if (p < 1) throw std::invalid_argument("Dataset: need at least 1 column");
  if (!values_.allFinite())
    throw std::invalid_argument("Dataset: non-finite entry");

  mean_ = values_.colwise().mean();
  sigma2_hat_ =
      (values_.rowwise() - mean_).squaredNorm() / (static_cast<double>(n) * p);

  // Nearest distinct neighbor per row; exact duplicates are skipped.
  mu_sigma_.resize(n);
  const double inf = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    double best = inf;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d2 = (values_.row(i) - values_.row(j)).squaredNorm();
      if (d2 > 0.0 && d2 < best) best = d2;
    }
    if (!std::isfinite(best))
      throw std::invalid_argument(
          "Dataset: all rows identical; nearest-distinct-neighbor scale "
          "undefined");
    mu_sigma_[i] = std::sqrt(best) / std::sqrt(static_cast<double>(p));
  }
}

// ---------------------------------------------------------------------------
// AugmentedTree
// ---------------------------------------------------------------------------

AugmentedTree::AugmentedTree(std::vector<int> parent)
    : parent_(std::move(parent)) {
  const int size = static_cast<int>(parent_.size());
  if (size < 2)
    throw std::invalid_argument("AugmentedTree: need at least one data node");
  const int n = size - 1;
  parent_[0] = -1;
  for (int i = 1; i <= n; ++i) {
    if (parent_[i] < 0 || parent_[i] > n)
      throw std::invalid_argument("AugmentedTree: parent[" +
                                  std::to_string(i) + "] out of range");
    if (parent_[i] == i)
      throw std::invalid_argument("AugmentedTree: self-loop at node " +
                                  std::to_string(i));
  }
  // Reachability of the hub from every node; marks nodes 0=unseen,
  // 1=on current path, 2=verified.
  std::vector<char> mark(size, 0);
  mark[0] = 2;
  std::vector<int> path;
  for (int i = 1; i <= n; ++i) {
    if (mark[i] == 2) continue;
    path.clear();
    int j = i;
    while (mark[j] == 0) {
      mark[j] = 1;
      path.push_back(j);
      j = parent_[j];
    }
    if (mark[j] == 1)
      throw std::invalid_argument(
          "AugmentedTree: cycle detected; node " + std::to_string(j) +
          " does not reach the hub");
    for (int v : path) mark[v] = 2;
  }
}

int AugmentedTree::hub_degree() const {
  int k = 0;
  for (int i = 1; i <= n(); ++i)
    if (parent_[i] == 0) ++k;
  return k;
}

std::vector<int> AugmentedTree::roots() const {
  std::vector<int> out;
  for (int i = 1; i <= n(); ++i)
    if (parent_[i] == 0) out.push_back(i);
  return out;
}

std::vector<std::vector<int>> AugmentedTree::adjacency() const {
  std::vector<std::vector<int>> adj(parent_.size());
  for (int i = 1; i <= n(); ++i) {
    adj[i].push_back(parent_[i]);
    adj[parent_[i]].push_back(i);
  }
  return adj;
}

std::vector<std::pair<int, int>> AugmentedTree::edges() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(n());
  for (int i = 1; i <= n(); ++i)
    out.emplace_back(std::min(i, parent_[i]), std::max(i, parent_[i]));
  std::sort(out.begin(), out.end());
  return out;
}

AugmentedTree validate_tree(const std::vector<int>& parent) {
  return AugmentedTree(parent);
}

// ---------------------------------------------------------------------------
// Partition
// ---------------------------------------------------------------------------

Partition::Partition(std::vector<int> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw std::invalid_argument("Partition: empty labels");
  // Canonicalize to first-occurrence order.
  std::vector<std::pair<int, int>> seen;  // (original label, canonical id)
  for (int& lab : labels_) {
    int canonical = 0;
    for (const auto& [orig, id] : seen) {
      if (orig == lab) {
        canonical = id;
        break;
      }
    }
    if (canonical == 0) {
      canonical = static_cast<int>(seen.size()) + 1;
      seen.emplace_back(lab, canonical);
    }
    lab = canonical;
  }
  k_ = static_cast<int>(seen.size());
}

std::vector<int> Partition::sizes() const {
  std::vector<int> out(k_, 0);
  for (int lab : labels_) ++out[lab - 1];
  return out;
}

Partition partition_from_tree(const AugmentedTree& tree) {
  const int n = tree.n();
  // root_of[i] = the hub-adjacent ancestor of node i; 0 marks unknown.
  std::vector<int> root_of(n + 1, 0);
  std::vector<int> path;
  for (int i = 1; i <= n; ++i) {
    if (root_of[i] != 0) continue;
    path.clear();
    int j = i;
    while (root_of[j] == 0 && tree.parent(j) != 0) {
      path.push_back(j);
      j = tree.parent(j);
    }
    const int r = (root_of[j] != 0) ? root_of[j] : j;
    root_of[j] = r;
    for (int v : path) root_of[v] = r;
  }
  std::vector<int> labels(n);
  for (int i = 1; i <= n; ++i) labels[i - 1] = root_of[i];
  return Partition(std::move(labels));
}

// ---------------------------------------------------------------------------
// ModelState
// ---------------------------------------------------------------------------

void ModelState::validate(int n, int p) const {
  if (sigma_tilde.size() != n || u_gamma.size() != n || mu.size() != p)
    throw std::invalid_argument("ModelState: dimension mismatch");
  if (!(gamma2 > 0.0) || !std::isfinite(gamma2))
    throw std::invalid_argument("ModelState: gamma2 must be positive");
  if (!(lambda > 0.0) || !(alpha_sigma > 0.0))
    throw std::invalid_argument(
        "ModelState: lambda and alpha_sigma must be positive");
  for (int i = 0; i < n; ++i) {
    if (!(sigma_tilde[i] > 0.0) || !std::isfinite(sigma_tilde[i]))
      throw std::invalid_argument("ModelState: sigma_tilde must be positive");
    if (!(u_gamma[i] > 0.0) || !std::isfinite(u_gamma[i]))
      throw std::invalid_argument("ModelState: u_gamma must be positive");
  }
}

ModelState initial_state(const Dataset& data, double lambda,
                         double alpha_sigma) {
  ModelState state;
  state.sigma_tilde = alpha_sigma * data.mu_sigma();
  state.gamma2 = data.sigma2_hat();
  state.mu = data.mean();
  state.u_gamma = Eigen::VectorXd::Ones(data.n());
  state.lambda = lambda;
  state.alpha_sigma = alpha_sigma;
  state.validate(data.n(), data.p());
  return state;
}

// ---------------------------------------------------------------------------
// LogSimilarity
// ---------------------------------------------------------------------------

LogSimilarity::LogSimilarity(Eigen::MatrixXd s) : s_(std::move(s)) {
  if (s_.rows() != s_.cols() || s_.rows() < 2)
    throw std::invalid_argument("LogSimilarity: need a square matrix, >= 2");
  if (!s_.allFinite())
    throw std::invalid_argument("LogSimilarity: non-finite entry");
  for (int i = 0; i < s_.rows(); ++i) {
    if (s_(i, i) != 0.0)
      throw std::invalid_argument("LogSimilarity: nonzero diagonal");
    for (int j = i + 1; j < s_.cols(); ++j) {
      if (std::abs(s_(i, j) - s_(j, i)) > 1e-12)
        throw std::invalid_argument("LogSimilarity: not symmetric");
    }
  }
}

}  // namespace spanforest
