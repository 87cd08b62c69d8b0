#include "spanforest/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace spanforest {

SimilarityMatrix::SimilarityMatrix(Eigen::MatrixXd a) : a_(std::move(a)) {
  if (a_.rows() != a_.cols() || a_.rows() < 1)
    throw std::invalid_argument("SimilarityMatrix: matrix must be square");
  if (!a_.allFinite())
    throw std::invalid_argument("SimilarityMatrix: non-finite entry");
  if ((a_.array() < 0.0).any())
    throw std::invalid_argument("SimilarityMatrix: negative entry");
  for (int i = 0; i < a_.rows(); ++i)
    if (a_(i, i) != 0.0)
      throw std::invalid_argument("SimilarityMatrix: nonzero diagonal at " +
                                  std::to_string(i));
  const double asym = (a_ - a_.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12)
    throw std::invalid_argument("SimilarityMatrix: asymmetry " +
                                std::to_string(asym) + " exceeds 1e-12");
  a_ = ((a_ + a_.transpose()) * 0.5).eval();
}

Eigen::MatrixXd normalized_laplacian(const SimilarityMatrix& a) {
  const int m = a.size();
  const Eigen::VectorXd d = a.degrees();
  for (int i = 0; i < m; ++i)
    if (!(d[i] > 0.0))
      throw std::invalid_argument("normalized_laplacian: zero-degree row " +
                                  std::to_string(i));
  const Eigen::VectorXd dis = d.array().rsqrt().matrix();
  Eigen::MatrixXd n = -(dis * dis.transpose()).cwiseProduct(a.matrix());
  n.diagonal().array() += 1.0;
  return ((n + n.transpose()) * 0.5).eval();
}

EigenBasis bottom_eigenvectors(const Eigen::MatrixXd& sym, int k) {
  const int m = static_cast<int>(sym.rows());
  if (sym.cols() != m) throw std::invalid_argument("bottom_eigenvectors: not square");
  if (k < 1 || k > m)
    throw std::invalid_argument("bottom_eigenvectors: K out of range");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      (sym + sym.transpose()) * 0.5);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("bottom_eigenvectors: eigensolver failed");

  EigenBasis basis;
  basis.vectors = solver.eigenvectors().leftCols(k);
  basis.values = solver.eigenvalues().head(k);
  // Deterministic sign: the largest-magnitude entry of each column is made
  // positive, first index winning ties.
  for (int c = 0; c < k; ++c) {
    int arg = 0;
    double best = -1.0;
    for (int r = 0; r < m; ++r) {
      const double mag = std::abs(basis.vectors(r, c));
      if (mag > best) {
        best = mag;
        arg = r;
      }
    }
    if (basis.vectors(arg, c) < 0.0) basis.vectors.col(c) = -basis.vectors.col(c);
  }
  return basis;
}

namespace {

double squared_distance(const Eigen::MatrixXd& points, int row,
                        const Eigen::RowVectorXd& center) {
  return (points.row(row) - center).squaredNorm();
}

struct KmeansRun {
  std::vector<int> assignment;
  double cost = std::numeric_limits<double>::infinity();
};

KmeansRun kmeans_once(const Eigen::MatrixXd& points, int k, Rng& rng) {
  const int m = static_cast<int>(points.rows());
  Eigen::MatrixXd centers(k, points.cols());

  // k-means++ seeding.
  centers.row(0) = points.row(static_cast<int>(rng.uniform_int(m)));
  std::vector<double> d2(m);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (int i = 0; i < m; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (int b = 0; b < c; ++b)
        best = std::min(best, squared_distance(points, i, centers.row(b)));
      d2[i] = best;
      total += best;
    }
    if (total > 0.0) {
      const double target = rng.uniform01() * total;
      double acc = 0.0;
      int pick = m - 1;
      for (int i = 0; i < m; ++i) {
        acc += d2[i];
        if (acc > target) {
          pick = i;
          break;
        }
      }
      centers.row(c) = points.row(pick);
    } else {
      // All points coincide with existing centers.
      centers.row(c) = points.row(static_cast<int>(rng.uniform_int(m)));
    }
  }

  KmeansRun run;
  run.assignment.assign(m, 0);
  double prev_cost = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 100; ++iter) {
    // Assignment step; nearest center, lowest index on ties.
    double cost = 0.0;
    for (int i = 0; i < m; ++i) {
      int arg = 0;
      double best = squared_distance(points, i, centers.row(0));
      for (int c = 1; c < k; ++c) {
        const double d = squared_distance(points, i, centers.row(c));
        if (d < best) {
          best = d;
          arg = c;
        }
      }
      run.assignment[i] = arg;
      cost += best;
    }
    run.cost = cost;

    // Update step.
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
    std::vector<int> counts(k, 0);
    for (int i = 0; i < m; ++i) {
      sums.row(run.assignment[i]) += points.row(i);
      ++counts[run.assignment[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        centers.row(c) = sums.row(c) / counts[c];
      } else {
        // Re-seed an empty cluster at the point farthest from its center
        // (lowest index on ties) so every cluster stays populated.
        int far = 0;
        double far_d = -1.0;
        for (int i = 0; i < m; ++i) {
          const double d =
              squared_distance(points, i, centers.row(run.assignment[i]));
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        centers.row(c) = points.row(far);
      }
    }

    if (iter > 0 && prev_cost - cost <= 1e-9 * prev_cost) break;
    prev_cost = cost;
  }
  return run;
}

}  // namespace

Partition kmeans(const Eigen::MatrixXd& points, int k, int restarts,
                 Rng& rng) {
  const int m = static_cast<int>(points.rows());
  if (m < 1) throw std::invalid_argument("kmeans: empty input");
  if (k < 1 || k > m) throw std::invalid_argument("kmeans: K out of range");
  if (restarts < 1) throw std::invalid_argument("kmeans: restarts < 1");
  if (!points.allFinite())
    throw std::invalid_argument("kmeans: non-finite input");

  KmeansRun best;
  for (int r = 0; r < restarts; ++r) {
    KmeansRun run = kmeans_once(points, k, rng);
    if (run.cost < best.cost) best = std::move(run);
  }
  std::vector<int> labels(m);
  for (int i = 0; i < m; ++i) labels[i] = best.assignment[i] + 1;
  return Partition(std::move(labels));
}

double normalized_cut_loss(const Partition& partition,
                           const SimilarityMatrix& a) {
  const int m = a.size();
  if (partition.n() != m)
    throw std::invalid_argument(
        "normalized_cut_loss: partition size does not match the matrix");
  const int k = partition.K();
  std::vector<double> cut(k, 0.0), vol(k, 0.0);
  const Eigen::VectorXd d = a.degrees();
  for (int i = 0; i < m; ++i) {
    vol[partition.label(i) - 1] += d[i];
    for (int j = 0; j < m; ++j)
      if (partition.label(i) != partition.label(j))
        cut[partition.label(i) - 1] += a.matrix()(i, j);
  }
  double loss = 0.0;
  for (int c = 0; c < k; ++c) {
    if (!(vol[c] > 0.0))
      throw std::invalid_argument("normalized_cut_loss: cluster " +
                                  std::to_string(c + 1) +
                                  " has zero total degree");
    loss += cut[c] / vol[c];
  }
  return loss;
}

Partition spectral_cluster(const SimilarityMatrix& a, int k, Rng& rng) {
  if (k < 1 || k > a.size())
    throw std::invalid_argument("spectral_cluster: K out of range");
  const Eigen::MatrixXd n = normalized_laplacian(a);
  EigenBasis basis = bottom_eigenvectors(n, k);
  for (int i = 0; i < basis.vectors.rows(); ++i) {
    const double norm = basis.vectors.row(i).norm();
    if (norm > 0.0) basis.vectors.row(i) /= norm;
  }
  return kmeans(basis.vectors, k, 20, rng);
}

}  // namespace spanforest
