#pragma once

// Synthetic Gaussian mixtures for the experiment families.
//
//   common-cond        mu_k = lambda / sqrt(1 + 1/(1+L)) e_k, Sigma = I + L e_1 e_1^T
//                      (so the covariance-adjusted separation equals lambda)
//   hetero-simplex     mu_k = lambda e_k, Sigma_k = I + (L-1) e_{k+1} e_{k+1}^T, e_{K+1} = e_1
//   em-adversarial     p = 1, K = 3, means (gamma, -gamma, 10 gamma), unit variances
//   random-cov         mu_k = lambda e_k, Sigma_k = U_k Lambda_k U_k^T with random
//                      orthogonal U_k and Lambda entries 1 + beta Z 1(Z > 0);
//                      drawn from cov_seed so they stay fixed across replicates
//   sample-complexity  hetero-simplex with mean scale lambda sqrt(log n)

#include "lasdp/core.hpp"
#include "lasdp/likelihood.hpp"

#include <cstdint>
#include <string_view>

namespace lasdp {

enum class Family { kCommonCond, kHeteroSimplex, kEmAdversarial, kRandomCov, kSampleComplexity };

std::string_view to_string(Family f);
Family family_from_string(std::string_view name);

struct GeneratorSpec {
  Family family = Family::kCommonCond;
  Index n = 200;
  Index p = 4;
  int k = 4;
  /// lambda for common-cond and sample-complexity, the center scale d otherwise.
  double lambda = 8.0;
  /// Condition number parameter L.
  double cond = 10.0;
  double gamma = 3.0;
  double beta = 5.0;
  std::uint64_t seed = 0;
  std::uint64_t cov_seed = 0;

  /// Throws ValidationError on out-of-range parameters.
  void validate() const;
};

/// Population parameters of the family (weights uniform).
GmmParams family_params(const GeneratorSpec& spec);

/// Balanced cluster sizes: n / K each, the remainder spread over the first clusters.
std::vector<Index> balanced_sizes(Index n, int k);

/// Draws n samples with labels 0..K-1 in contiguous runs.
Dataset generate(const GeneratorSpec& spec);

/// f(x) = log(1/x - 1) with x clamped to [1e-6, 1 - 1e-6].
double logit_transform(double x);
/// Scales each feature (row) to [0, 1], then applies logit_transform entrywise.
MatrixXd range_logit_transform(const MatrixXd& x);

}  // namespace lasdp
