#include "spanforest/matrixtree.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>

#include "spanforest/datagen.hpp"
#include "spanforest/mcmc.hpp"
#include "spanforest/spectral.hpp"

namespace spanforest {

namespace {

// Shifted weight matrix W = exp(S - shift) off the diagonal (zero diag)
// and the shift itself. The shift keeps exponentials bounded by 1.
std::pair<Eigen::MatrixXd, double> shifted_weights(const LogSimilarity& s) {
  const int p = s.size();
  double shift = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      if (i != j) shift = std::max(shift, s(i, j));
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      if (i != j) w(i, j) = std::exp(s(i, j) - shift);
  return {std::move(w), shift};
}

// Cholesky of the shifted Laplacian L + J/p^2 (symmetrized first); SPD by
// construction since L is PSD with null space spanned by 1 and J is PD there.
Eigen::LLT<Eigen::MatrixXd> shifted_laplacian_llt(const Eigen::MatrixXd& w) {
  const int p = static_cast<int>(w.rows());
  Eigen::MatrixXd lt = Eigen::MatrixXd::Constant(
      p, p, 1.0 / (static_cast<double>(p) * static_cast<double>(p)));
  lt -= w;
  lt.diagonal() += w.rowwise().sum();
  lt = ((lt + lt.transpose()) * 0.5).eval();
  Eigen::LLT<Eigen::MatrixXd> llt(lt);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error(
        "matrixtree: Cholesky of the shifted Laplacian failed");
  return llt;
}

}  // namespace

double count_weighted_trees_log(const LogSimilarity& s) {
  const auto [w, shift] = shifted_weights(s);
  const auto llt = shifted_laplacian_llt(w);
  // |L + J/p^2| equals the weighted tree total; each tree carries n edges,
  // so the shift re-enters as n * shift.
  const double log_det =
      2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return log_det + s.n() * shift;
}

EdgeMarginals edge_marginals(const LogSimilarity& s) {
  const int p = s.size();
  const auto [w, shift] = shifted_weights(s);
  const auto llt = shifted_laplacian_llt(w);
  const Eigen::MatrixXd omega = llt.solve(Eigen::MatrixXd::Identity(p, p));
  EdgeMarginals out;
  out.m = Eigen::MatrixXd::Zero(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      double v = (omega(i, i) + omega(j, j) - 2.0 * omega(i, j)) * w(i, j);
      v = std::clamp(v, 0.0, 1.0);
      out.m(i, j) = v;
      out.m(j, i) = v;
    }
  }
  return out;
}

std::vector<std::pair<AugmentedTree, double>> enumerate_trees(
    const LogSimilarity& s) {
  const int p = s.size();
  if (p > 8)
    throw std::invalid_argument(
        "enumerate_trees: guarded to 8 nodes (got " + std::to_string(p) + ")");

  long long count = 1;
  for (int i = 0; i < p - 2; ++i) count *= p;

  std::vector<std::pair<AugmentedTree, double>> out;
  out.reserve(static_cast<std::size_t>(count));

  std::vector<int> seq(std::max(p - 2, 0));
  std::vector<int> degree(p);
  std::vector<std::pair<int, int>> edge_list(p - 1);
  for (long long code = 0; code < count; ++code) {
    long long rem = code;
    for (int k = 0; k < p - 2; ++k) {
      seq[k] = static_cast<int>(rem % p);
      rem /= p;
    }

    // Canonical Prufer decode, smallest-leaf-first by full scan (p <= 8).
    std::fill(degree.begin(), degree.end(), 1);
    for (int v : seq) ++degree[v];
    int e = 0;
    for (int v : seq) {
      int leaf = -1;
      for (int j = 0; j < p; ++j)
        if (degree[j] == 1) {
          leaf = j;
          break;
        }
      edge_list[e++] = {std::min(leaf, v), std::max(leaf, v)};
      degree[leaf] = 0;
      --degree[v];
    }
    int a = -1, b = -1;
    for (int j = 0; j < p; ++j)
      if (degree[j] == 1) (a < 0 ? a : b) = j;
    edge_list[e++] = {a, b};

    // Orient parents toward the hub.
    std::vector<std::vector<int>> adj(p);
    for (auto [x, y] : edge_list) {
      adj[x].push_back(y);
      adj[y].push_back(x);
    }
    std::vector<int> parent(p, -1);
    std::vector<int> stack = {0};
    std::vector<char> seen(p, 0);
    seen[0] = 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int u : adj[v])
        if (!seen[u]) {
          seen[u] = 1;
          parent[u] = v;
          stack.push_back(u);
        }
    }

    double log_w = 0.0;
    for (auto [x, y] : edge_list) log_w += s(x, y);
    out.emplace_back(AugmentedTree(std::move(parent)), log_w);
  }
  return out;
}

double procrustes_distance(const Eigen::MatrixXd& u,
                           const Eigen::MatrixXd& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols())
    throw std::invalid_argument("procrustes_distance: shape mismatch");
  const int k = static_cast<int>(u.cols());
  if (k < 1) throw std::invalid_argument("procrustes_distance: empty basis");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(v.transpose() * u);
  const double overlap = svd.singularValues().sum();
  return std::sqrt(std::max(0.0, 2.0 * k - 2.0 * overlap));
}

namespace {

// One replicate: simulate the three-component mixture, fit the chain,
// rebuild S at the posterior-mean scales, compare the top-5 eigenvectors
// of M with those of -N.
double eigencheck_replicate(int n, Rng& rng) {
  const std::vector<Eigen::RowVector2d> means = {
      {0.0, 0.0}, {2.0, 2.0}, {4.0, 4.0}};
  const GeneratedData gen = gen_gaussian_mixture(n, means, rng);

  ChainConfig cfg;
  cfg.iterations = 300;
  const std::vector<McmcSample> samples =
      run_chain(gen.data, cfg, nullptr, rng);

  Eigen::VectorXd sigma_mean = Eigen::VectorXd::Zero(n);
  double gamma2_mean = 0.0;
  for (const McmcSample& smp : samples) {
    sigma_mean += smp.sigma_tilde;
    gamma2_mean += smp.gamma2;
  }
  sigma_mean /= static_cast<double>(samples.size());
  gamma2_mean /= static_cast<double>(samples.size());

  ModelState state = initial_state(gen.data);
  state.sigma_tilde = sigma_mean;
  state.gamma2 = gamma2_mean;
  const LogSimilarity s = build_S(gen.data, state);

  const EdgeMarginals marg = edge_marginals(s);

  // Similarity exp(S - shift); N is invariant to the global scale.
  const int p = s.size();
  double shift = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      if (i != j) shift = std::max(shift, s(i, j));
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      if (i != j) a(i, j) = std::exp(s(i, j) - shift);
  const Eigen::MatrixXd nlap = normalized_laplacian(SimilarityMatrix(a));

  constexpr int kTop = 5;
  const EigenBasis m_basis = bottom_eigenvectors(-marg.m, kTop);
  const EigenBasis n_basis = bottom_eigenvectors(nlap, kTop);
  return procrustes_distance(m_basis.vectors, n_basis.vectors);
}

}  // namespace

std::vector<EigencheckRow> eigencheck_experiment(const std::vector<int>& n_grid,
                                                 int replicates, Rng& rng,
                                                 int threads) {
  if (replicates < 1)
    throw std::invalid_argument("eigencheck_experiment: replicates < 1");
  for (int n : n_grid)
    if (n < 6)
      throw std::invalid_argument("eigencheck_experiment: n too small");

  // Draw every job's stream seed up front from the caller's generator so
  // the output does not depend on the thread count or schedule.
  struct Job {
    int n;
    int replicate;
    std::uint64_t seed;
    std::uint64_t stream;
  };
  std::vector<Job> jobs;
  jobs.reserve(n_grid.size() * static_cast<std::size_t>(replicates));
  for (int n : n_grid)
    for (int r = 0; r < replicates; ++r)
      jobs.push_back({n, r, rng.next_u64(), rng.next_u64()});

  std::vector<double> distance(jobs.size());
  auto run_range = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t idx = lo; idx < hi; ++idx) {
      Rng job_rng = Rng::for_stream(jobs[idx].seed, jobs[idx].stream);
      distance[idx] = eigencheck_replicate(jobs[idx].n, job_rng);
    }
  };
  if (threads <= 1) {
    run_range(0, jobs.size());
  } else {
    const int workers = static_cast<int>(
        std::min<std::size_t>(static_cast<std::size_t>(threads), jobs.size()));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      const std::size_t lo = jobs.size() * w / workers;
      const std::size_t hi = jobs.size() * (w + 1) / workers;
      pool.emplace_back(run_range, lo, hi);
    }
    for (auto& t : pool) t.join();
  }

  std::vector<EigencheckRow> out;
  out.reserve(jobs.size());
  for (std::size_t idx = 0; idx < jobs.size(); ++idx)
    out.push_back({jobs[idx].n, jobs[idx].replicate, distance[idx]});
  return out;
}

}  // namespace spanforest
