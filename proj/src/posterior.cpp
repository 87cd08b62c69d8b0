#include "spanforest/posterior.hpp"

#include "spanforest/spectral.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace spanforest {

CoassignmentAccumulator::CoassignmentAccumulator(int n) {
  if (n < 1)
    throw std::invalid_argument("CoassignmentAccumulator: n < 1");
  together_ = Eigen::MatrixXd::Zero(n, n);
}

void CoassignmentAccumulator::add(const Partition& partition) {
  const int n = static_cast<int>(together_.rows());
  if (partition.n() != n)
    throw std::invalid_argument(
        "CoassignmentAccumulator: partition size mismatch");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (partition.label(i) == partition.label(j)) together_(i, j) += 1.0;
  ++k_counts_[partition.K()];
  ++count_;
}

Eigen::MatrixXd CoassignmentAccumulator::psm() const {
  if (count_ < 1)
    throw std::logic_error("CoassignmentAccumulator: no partitions added");
  Eigen::MatrixXd m = together_ / static_cast<double>(count_);
  m = (m + m.transpose()).eval();
  m.diagonal().setOnes();
  return m;
}

int CoassignmentAccumulator::k_mode() const {
  if (count_ < 1)
    throw std::logic_error("CoassignmentAccumulator: no partitions added");
  int best_k = 0;
  int best_count = -1;
  for (const auto& [k, c] : k_counts_)  // ascending K; ties keep the smaller
    if (c > best_count) {
      best_count = c;
      best_k = k;
    }
  return best_k;
}

Eigen::MatrixXd coassignment(const std::vector<McmcSample>& samples) {
  if (samples.empty())
    throw std::invalid_argument("coassignment: empty sample list");
  CoassignmentAccumulator acc(samples.front().tree.n());
  for (const McmcSample& smp : samples) acc.add(partition_from_tree(smp.tree));
  return acc.psm();
}

int k_mode(const std::vector<McmcSample>& samples) {
  if (samples.empty()) throw std::invalid_argument("k_mode: empty sample list");
  CoassignmentAccumulator acc(samples.front().tree.n());
  for (const McmcSample& smp : samples) acc.add(partition_from_tree(smp.tree));
  return acc.k_mode();
}

Partition point_estimate(const Eigen::MatrixXd& psm, int k_hat, Rng& rng) {
  const int n = static_cast<int>(psm.rows());
  if (psm.cols() != n || n < 1)
    throw std::invalid_argument("point_estimate: psm must be square");
  if (k_hat < 1 || k_hat > n)
    throw std::invalid_argument("point_estimate: k_hat out of range");

  Eigen::MatrixXd a = psm;
  a.diagonal().setZero();

  // Rows never co-assigned with any other point have zero degree, which the
  // spectral routines reject; they become forced singletons and the rest is
  // clustered with a correspondingly reduced K.
  std::vector<int> active;
  std::vector<int> isolated;
  for (int i = 0; i < n; ++i) {
    if (a.row(i).sum() > 0.0)
      active.push_back(i);
    else
      isolated.push_back(i);
  }

  std::vector<int> labels(n, 0);
  int next_label = 1;
  if (!active.empty()) {
    const int m = static_cast<int>(active.size());
    Eigen::MatrixXd sub(m, m);
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c) sub(r, c) = a(active[r], active[c]);
    int k_eff = k_hat - static_cast<int>(isolated.size());
    k_eff = std::clamp(k_eff, 1, m);
    const Partition part = spectral_cluster(SimilarityMatrix(std::move(sub)),
                                            k_eff, rng);
    for (int r = 0; r < m; ++r) labels[active[r]] = part.label(r);
    next_label = part.K() + 1;
  }
  for (int i : isolated) labels[i] = next_label++;
  return Partition(std::move(labels));
}

double hungarian_accuracy(const Partition& estimate, const Partition& truth) {
  if (estimate.n() != truth.n())
    throw std::invalid_argument("hungarian_accuracy: length mismatch");
  const int n = estimate.n();
  const int dim = std::max(estimate.K(), truth.K());

  // Contingency counts padded to a square table.
  std::vector<std::vector<long long>> overlap(
      dim, std::vector<long long>(dim, 0));
  for (int i = 0; i < n; ++i)
    ++overlap[estimate.label(i) - 1][truth.label(i) - 1];

  // O(dim^3) Hungarian method on cost = -overlap (maximum matching).
  constexpr long long kInf = std::numeric_limits<long long>::max() / 4;
  std::vector<long long> u(dim + 1, 0), v(dim + 1, 0);
  std::vector<int> match(dim + 1, 0), way(dim + 1, 0);
  for (int i = 1; i <= dim; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<long long> minv(dim + 1, kInf);
    std::vector<char> used(dim + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      long long delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= dim; ++j) {
        if (used[j]) continue;
        const long long cur = -overlap[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= dim; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  long long matched = 0;
  for (int j = 1; j <= dim; ++j)
    if (match[j] != 0) matched += overlap[match[j] - 1][j - 1];
  return static_cast<double>(matched) / static_cast<double>(n);
}

PosteriorSummary summarize(const std::vector<McmcSample>& samples,
                           std::optional<int> k_override, Rng& rng) {
  if (samples.empty())
    throw std::invalid_argument("summarize: empty sample list");
  CoassignmentAccumulator acc(samples.front().tree.n());
  for (const McmcSample& smp : samples) acc.add(partition_from_tree(smp.tree));

  const int modal = acc.k_mode();
  const int k_hat = k_override.value_or(modal);
  Eigen::MatrixXd psm = acc.psm();
  Partition point = point_estimate(psm, k_hat, rng);
  return PosteriorSummary{std::move(psm), acc.k_counts(), modal,
                          std::move(point)};
}

}  // namespace spanforest
