#pragma once

// Symmetric eigen-machinery used across the toolkit. Decompositions go
// through LAPACK dsyevr; everything else is plain Eigen.

#include <Eigen/Dense>

namespace lasdp::linalg {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Eigenvalues in ascending order with matching column eigenvectors.
struct SymEigen {
  VectorXd values;
  MatrixXd vectors;
};

SymEigen sym_eigen(const MatrixXd& a);
VectorXd sym_eigenvalues(const MatrixXd& a);
/// The `count` largest eigenpairs, still in ascending order.
SymEigen sym_eigen_top(const MatrixXd& a, Index count);

/// Nearest PSD matrix in Frobenius norm (negative eigenvalues clamped to 0).
MatrixXd project_psd(const MatrixXd& a);

inline MatrixXd symmetrize(const MatrixXd& a) { return 0.5 * (a + a.transpose()); }

/// Eigenvalue floor eps = 1e-6 * (tr(S)/p + 1e-12).
double psd_floor_level(const MatrixXd& s);
/// Symmetrize, then raise eigenvalues below psd_floor_level to it.
MatrixXd apply_psd_floor(const MatrixXd& s);

/// Cached spectral factorization of a positive definite matrix.
class SpdFactor {
 public:
  /// Throws CovarianceSingular unless every eigenvalue is positive.
  explicit SpdFactor(const MatrixXd& sigma);

  const MatrixXd& inverse() const { return inverse_; }
  const MatrixXd& inv_sqrt() const { return inv_sqrt_; }
  const MatrixXd& sqrt() const { return sqrt_; }
  double logdet() const { return logdet_; }
  const VectorXd& eigenvalues() const { return eig_.values; }

 private:
  SymEigen eig_;
  MatrixXd inverse_;
  MatrixXd inv_sqrt_;
  MatrixXd sqrt_;
  double logdet_ = 0.0;
};

}  // namespace lasdp::linalg
