#pragma once

// Evaluation: permutation-matched mis-clustering error and the separation
// diagnostics (Delta, D_(k,l), M, m) used in the exact-recovery condition.

#include "lasdp/core.hpp"

#include <vector>

namespace lasdp {

/// Maximum-weight perfect matching on a square matrix (Hungarian method).
/// Returns col[r], the column matched to row r.
std::vector<int> max_weight_assignment(const MatrixXd& weight);

/// Confusion counts c(a, b) = #{i : est_i = a, truth_i = b}, padded with zero
/// rows/columns to max(est.k, truth.k) square.
MatrixXd confusion_matrix(const Partition& est, const Partition& truth);

/// Fraction of points mislabeled under the best relabeling of `est`.
double misclustering_error(const Partition& est, const Partition& truth);

struct SeparationDiagnostics {
  /// min_{k != l} ||Sigma_k^{-1/2} (mu_k - mu_l)||^2
  double delta_sq = 0.0;
  /// K x K, D(k, l) from the eigenvalues of Sigma_l^{1/2} Sigma_k^{-1} Sigma_l^{1/2} - I.
  MatrixXd d;
  /// max_{k != l} ||Sigma_l^{1/2} Sigma_k^{-1} Sigma_l^{1/2}||_op
  double big_m = 0.0;
  /// min_{k != l} 2 n_k n_l / (n_k + n_l)
  double small_m = 0.0;
  Index min_size = 0;

  double delta() const;
  /// min_{k != l} D(k, l); 0 when K < 2.
  double d_min() const;
};

/// Throws CovarianceSingular for a non positive definite covariance.
SeparationDiagnostics separation_diagnostics(const std::vector<VectorXd>& means,
                                             const std::vector<MatrixXd>& covariances,
                                             const std::vector<Index>& cluster_sizes);

}  // namespace lasdp
