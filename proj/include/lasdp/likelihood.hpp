#pragma once

// Likelihood kernels for the heterogeneous Gaussian mixture.
//
// Convention for the profile log-likelihood: the n p log(2 pi) term and the
// global factor 1/2 are dropped, so for a partition (G_k) and covariances
// (Sigma_k)
//
//   l = - sum_k |G_k| log|Sigma_k|
//       - sum_k sum_{i in G_k} ||X_i||^2_{Sigma_k^-1}
//       + sum_k |G_k|^-1 sum_{i,j in G_k} <X_i, X_j>_{Sigma_k^-1}
//
// which is exactly sum_k <A^(k), Z_k> for the lifted partition. Every module
// that reports a profile log-likelihood uses this convention.

#include "lasdp/core.hpp"
#include "lasdp/sdp.hpp"

#include <vector>

namespace lasdp {

/// Per-component Gaussian parameters. `weights` is empty unless set by EM.
struct GmmParams {
  std::vector<VectorXd> means;
  std::vector<MatrixXd> covariances;
  VectorXd weights;

  int k() const { return static_cast<int>(means.size()); }
};

/// A^(k) = -log|Sigma_k| 11^T - (v_k 1^T + 1 v_k^T)/2 + X^T Sigma_k^-1 X,
/// with v_k = diag(X^T Sigma_k^-1 X).
struct SimilarityMatrix {
  MatrixXd a;
  int source_cov_id = 0;
};

/// Throws CovarianceSingular for singular or indefinite sigma (no regularization).
SimilarityMatrix similarity_matrix(const Dataset& data, const MatrixXd& sigma, int k);
std::vector<MatrixXd> similarity_matrices(const Dataset& data,
                                          const std::vector<MatrixXd>& covariances);

/// The same A^(k) as F G F^T with F = [X^T, 1, v] (n x (p + 2)).
FactoredCost similarity_factors(const Dataset& data, const MatrixXd& sigma);

double profile_loglik(const Dataset& data, const Partition& partition,
                      const std::vector<MatrixXd>& covariances);

/// sum_k <A^(k), Z_k>.
double lifted_objective(const std::vector<MatrixXd>& a_list, const LiftedMembership& z);

/// Closed-form maximizer of <A^(k)(Sigma), Z_k> over Sigma:
///   (1^T Z_k 1)^-1 sum_ij [ (X_i X_i^T + X_j X_j^T)/2 - X_i X_j^T ] Z_k,ij
/// symmetrized and PSD-floored. Throws EmptySoftCluster if 1^T Z_k 1 <= mass_tol.
MatrixXd covariance_update_block(const MatrixXd& x, const MatrixXd& zk, double mass_tol = 1e-8);
std::vector<MatrixXd> covariance_update(const Dataset& data, const LiftedMembership& z,
                                        double mass_tol = 1e-8);

/// Rank-1 Z_k = w w^T / (w^T 1) read as soft-cluster weights.
struct SoftDecomposition {
  VectorXd weights;
  VectorXd mean;
  MatrixXd covariance;
};

inline constexpr double kRankTol = 1e-6;

/// Throws NotRankOne when the second eigenvalue exceeds rank_tol * the first.
SoftDecomposition soft_decomposition(const MatrixXd& x, const MatrixXd& zk,
                                     double rank_tol = kRankTol);

/// sum_i log sum_k pi_k N(X_i; mu_k, Sigma_k), log-sum-exp stabilized, all constants kept.
double observed_loglik(const Dataset& data, const GmmParams& theta);

/// n x K matrix of log(pi_k) + log N(X_i; mu_k, Sigma_k).
MatrixXd component_log_densities(const MatrixXd& x, const GmmParams& theta);

}  // namespace lasdp
