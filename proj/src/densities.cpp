#include "spanforest/densities.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>
#include <vector>

namespace spanforest {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr double kLogPi = 1.1447298858494001741434273513531;
}  // namespace

double log_leaf(const Eigen::RowVectorXd& yi, const Eigen::RowVectorXd& yj,
                double sigma_ij) {
  if (yi.size() != yj.size())
    throw std::invalid_argument("log_leaf: dimension mismatch");
  if (!(sigma_ij > 0.0) || !std::isfinite(sigma_ij))
    throw std::invalid_argument("log_leaf: sigma_ij must be positive");
  const double p = static_cast<double>(yi.size());
  const double d2 = (yi - yj).squaredNorm();
  return -0.5 * p * (kLog2Pi + std::log(sigma_ij)) - d2 / (2.0 * sigma_ij);
}

double log_root(const Eigen::RowVectorXd& yi, const Eigen::RowVectorXd& mu,
                double gamma2) {
  if (yi.size() != mu.size())
    throw std::invalid_argument("log_root: dimension mismatch");
  if (!(gamma2 > 0.0) || !std::isfinite(gamma2))
    throw std::invalid_argument("log_root: gamma2 must be positive");
  const double p = static_cast<double>(yi.size());
  const double d2 = (yi - mu).squaredNorm();
  return std::lgamma(0.5 * (1.0 + p)) - 0.5 * p * std::log(gamma2) -
         0.5 * (1.0 + p) * kLogPi - 0.5 * (1.0 + p) * std::log1p(d2 / gamma2);
}

LogSimilarity build_S_from_dist(const Eigen::MatrixXd& dist2,
                                const Eigen::VectorXd& mu_dist2,
                                const ModelState& state, int p, int threads) {
  const int n = static_cast<int>(dist2.rows());
  const double pd = static_cast<double>(p);
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n + 1, n + 1);

  // Hub row: log root density + log lambda. The Cauchy normalizer is
  // shared by every entry.
  const double root_const = std::lgamma(0.5 * (1.0 + pd)) -
                            0.5 * pd * std::log(state.gamma2) -
                            0.5 * (1.0 + pd) * kLogPi + std::log(state.lambda);
  for (int i = 0; i < n; ++i) {
    const double v =
        root_const - 0.5 * (1.0 + pd) * std::log1p(mu_dist2[i] / state.gamma2);
    s(0, i + 1) = v;
    s(i + 1, 0) = v;
  }

  const Eigen::VectorXd log_sigma = state.sigma_tilde.array().log().matrix();
  auto fill_rows = [&](int row_begin, int row_end) {
    for (int i = row_begin; i < row_end; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double sigma_ij = state.sigma_tilde[i] * state.sigma_tilde[j];
        const double v =
            -0.5 * pd * (kLog2Pi + log_sigma[i] + log_sigma[j]) -
            dist2(i, j) / (2.0 * sigma_ij);
        s(i + 1, j + 1) = v;
        s(j + 1, i + 1) = v;
      }
    }
  };
  if (threads <= 1 || n < 64) {
    fill_rows(0, n);
  } else {
    // Static row blocks; every entry is written exactly once, so the
    // result is identical for any thread count.
    const int workers = std::min(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      const int lo = static_cast<int>(static_cast<long long>(n) * w / workers);
      const int hi =
          static_cast<int>(static_cast<long long>(n) * (w + 1) / workers);
      pool.emplace_back(fill_rows, lo, hi);
    }
    for (auto& t : pool) t.join();
  }
  return LogSimilarity(std::move(s));
}

LogSimilarity build_S(const Dataset& data, const ModelState& state) {
  state.validate(data.n(), data.p());
  const int n = data.n();
  Eigen::MatrixXd dist2(n, n);
  for (int i = 0; i < n; ++i) {
    dist2(i, i) = 0.0;
    for (int j = i + 1; j < n; ++j) {
      const double d2 = (data.values().row(i) - data.values().row(j)).squaredNorm();
      dist2(i, j) = d2;
      dist2(j, i) = d2;
    }
  }
  const Eigen::VectorXd mu_dist2 =
      (data.values().rowwise() - state.mu).rowwise().squaredNorm();
  return build_S_from_dist(dist2, mu_dist2, state, data.p());
}

double log_posterior_tree(const AugmentedTree& tree, const LogSimilarity& s) {
  if (tree.n() != s.n())
    throw std::invalid_argument("log_posterior_tree: dimension mismatch");
  double total = 0.0;
  for (int i = 1; i <= tree.n(); ++i) total += s(i, tree.parent(i));
  return total;
}

double crp_forest_log_prior(const AugmentedTree& tree, double alpha) {
  if (!(alpha > 0.0))
    throw std::invalid_argument("crp_forest_log_prior: alpha <= 0");
  const int n = tree.n();
  const Partition partition = partition_from_tree(tree);
  double total = partition.K() * std::log(alpha) + std::lgamma(alpha) -
                 std::lgamma(alpha + n);
  for (int nk : partition.sizes())
    total += std::lgamma(static_cast<double>(nk)) -
             (nk - 1) * std::log(static_cast<double>(nk));
  return total;
}

double geometric_tree_log_prior(const AugmentedTree& tree, double lambda) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("geometric_tree_log_prior: lambda <= 0");
  return tree.hub_degree() * std::log(lambda);
}

// ---------------------------------------------------------------------------
// Covariate adjustment
// ---------------------------------------------------------------------------

CovariatePriorConfig make_covariate_prior(const Eigen::MatrixXd& x,
                                          double eta) {
  if (x.rows() < 1 || x.cols() < 1)
    throw std::invalid_argument("make_covariate_prior: empty covariates");
  if (!x.allFinite())
    throw std::invalid_argument("make_covariate_prior: non-finite covariate");
  if (!(eta > 0.0))
    throw std::invalid_argument("make_covariate_prior: eta <= 0");
  CovariatePriorConfig cfg;
  cfg.x = x;
  cfg.eta = eta;
  const Eigen::RowVectorXd xbar = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - xbar;
  cfg.sn = (centered.transpose() * centered) / static_cast<double>(x.rows());
  return cfg;
}

namespace {

// Cholesky of 4*Sigma1 with Sigma1 = eta*(Sn + ridge I); shared by the two
// kernels. Returns the factorization and log|2 pi (2 Sigma1)|.
std::pair<Eigen::LLT<Eigen::MatrixXd>, double> covariate_factor(
    const CovariatePriorConfig& cfg) {
  const int m = static_cast<int>(cfg.sn.rows());
  if (cfg.sn.cols() != m)
    throw std::invalid_argument("covariate_adjust_S: Sn not square");
  if (!(cfg.eta > 0.0))
    throw std::invalid_argument("covariate_adjust_S: eta <= 0");
  const double ridge = 1e-8 * cfg.sn.diagonal().mean();
  const Eigen::MatrixXd sigma1 =
      cfg.eta * (cfg.sn + ridge * Eigen::MatrixXd::Identity(m, m));
  Eigen::LLT<Eigen::MatrixXd> llt(4.0 * sigma1);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error(
        "covariate_adjust_S: Sigma1 not positive definite after "
        "regularization");
  // |2 pi (2 Sigma1)| = (4 pi)^m |Sigma1|; |4 Sigma1| = 4^m |Sigma1|.
  const double log_det_4sigma1 =
      2.0 * llt.matrixLLT().diagonal().array().log().sum();
  const double log_det_sigma1 =
      log_det_4sigma1 - m * std::log(4.0);
  const double log_norm = m * std::log(4.0 * std::numbers::pi) + log_det_sigma1;
  return {std::move(llt), log_norm};
}

}  // namespace

Eigen::MatrixXd covariate_log_f0(const CovariatePriorConfig& cfg) {
  const auto [llt, log_norm] = covariate_factor(cfg);
  const int n = static_cast<int>(cfg.x.rows());
  Eigen::MatrixXd f0 = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Eigen::VectorXd d = (cfg.x.row(i) - cfg.x.row(j)).transpose();
      const double quad = d.dot(llt.solve(d));
      const double v = -0.5 * log_norm - quad;
      f0(i, j) = v;
      f0(j, i) = v;
    }
  }
  return f0;
}

Eigen::VectorXd covariate_log_r0(const CovariatePriorConfig& cfg) {
  const auto [llt, log_norm] = covariate_factor(cfg);
  const int n = static_cast<int>(cfg.x.rows());
  Eigen::VectorXd r0(n);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd xi = cfg.x.row(i).transpose();
    r0[i] = -0.5 * log_norm - xi.dot(llt.solve(xi));
  }
  return r0;
}

LogSimilarity covariate_adjust_S(const LogSimilarity& s,
                                 const CovariatePriorConfig& cfg) {
  const int n = s.n();
  if (cfg.x.rows() != n)
    throw std::invalid_argument(
        "covariate_adjust_S: covariate rows do not match data rows");
  const Eigen::MatrixXd f0 = covariate_log_f0(cfg);
  const Eigen::VectorXd r0 = covariate_log_r0(cfg);
  Eigen::MatrixXd out = s.matrix();
  for (int i = 1; i <= n; ++i) {
    out(0, i) += r0[i - 1];
    out(i, 0) += r0[i - 1];
    for (int j = i + 1; j <= n; ++j) {
      out(i, j) += f0(i - 1, j - 1);
      out(j, i) += f0(i - 1, j - 1);
    }
  }
  return LogSimilarity(std::move(out));
}

}  // namespace spanforest
