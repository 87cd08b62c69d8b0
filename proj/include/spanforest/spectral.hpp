#pragma once
// Normalized spectral clustering: the normalized Laplacian, bottom
// eigenvectors with a deterministic sign convention, k-means++ with
// restarts, and the normalized-cut loss.

#include <Eigen/Dense>

#include "spanforest/core.hpp"
#include "spanforest/randkit.hpp"

namespace spanforest {

// Nonnegative symmetric similarity matrix with zero diagonal. Symmetry is
// required within 1e-12 and the stored matrix is exactly symmetrized.
class SimilarityMatrix {
 public:
  explicit SimilarityMatrix(Eigen::MatrixXd a);

  int size() const { return static_cast<int>(a_.rows()); }
  const Eigen::MatrixXd& matrix() const { return a_; }
  // Row degrees D_ii = sum_j A_ij.
  Eigen::VectorXd degrees() const { return a_.rowwise().sum(); }

 private:
  Eigen::MatrixXd a_;
};

struct EigenBasis {
  Eigen::MatrixXd vectors;  // m x K, columns orthonormal
  Eigen::VectorXd values;   // K eigenvalues, ascending
};

// N = D^(-1/2) (D - A) D^(-1/2). Throws on zero-degree rows. Eigenvalues
// lie in [0, 2]; for a connected graph the smallest is 0 with eigenvector
// proportional to D^(1/2) 1.
Eigen::MatrixXd normalized_laplacian(const SimilarityMatrix& a);

// The K eigenvectors of smallest eigenvalue of a symmetric matrix,
// ascending, with a deterministic sign convention: each column's
// largest-magnitude entry is positive (first index on ties).
EigenBasis bottom_eigenvectors(const Eigen::MatrixXd& sym, int k);

// Best-of-restarts k-means++ on the rows of `points`. Lloyd iterations cap
// at 100 with relative cost tolerance 1e-9; the lowest-cost restart wins
// (earliest restart on ties). Deterministic given the generator state.
Partition kmeans(const Eigen::MatrixXd& points, int k, int restarts, Rng& rng);

// Normalized cut: sum_k (cross-cluster similarity of V_k) / (degree mass
// of V_k). Throws if some cluster has zero total degree.
double normalized_cut_loss(const Partition& partition,
                           const SimilarityMatrix& a);

// Bottom-K eigenvectors of the normalized Laplacian, rows renormalized to
// unit length (Ng-Jordan-Weiss), then k-means with 20 restarts.
Partition spectral_cluster(const SimilarityMatrix& a, int k, Rng& rng);

}  // namespace spanforest
