#pragma once

// Variants for large p (F-test attribute screening, Fisher-LDA reduction) and
// large n (sketch-and-lift subsampling).

#include "lasdp/baselines.hpp"
#include "lasdp/core.hpp"
#include "lasdp/pipeline.hpp"

#include <cstdint>
#include <vector>

namespace lasdp {

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

/// Upper tail P(F > f) for the F(d1, d2) distribution.
double f_test_pvalue(double f, double d1, double d2);

struct AnovaResult {
  VectorXd f;
  VectorXd p_values;
  /// Attribute constant over all samples: F undefined, p-value set to 1.
  std::vector<bool> constant;
  /// Zero within-group variance but nonzero between: F infinite, p-value 0.
  std::vector<bool> zero_within;
};

/// One-way ANOVA of every attribute (row of x) across the groups.
AnovaResult anova_f(const MatrixXd& x, const Partition& groups);

struct ScreenResult {
  /// Kept attributes, ascending.
  std::vector<Index> selected;
  VectorXd p_values;
  std::vector<bool> flagged;
  /// max P / min P >= C.
  bool clear_cutoff = true;
};

/// Keep the p0 attributes with the smallest p-values; when there is no clear
/// cutoff (max P / min P < c) keep each remaining attribute with probability alpha.
ScreenResult ftest_screen(const Dataset& data, const Partition& groups, int p0, double alpha,
                          double c, std::uint64_t seed);
/// Same, with groups from hierarchical clustering into k clusters.
ScreenResult ftest_screen(const Dataset& data, int k, int p0, double alpha, double c,
                          std::uint64_t seed, Linkage linkage = Linkage::kWard);

struct LdaResult {
  /// q x n with q = k_tilde - 1.
  MatrixXd transformed;
  /// p x q, orthonormal in the pooled within-cluster metric.
  MatrixXd directions;
  int k_tilde = 0;
  /// Delta(K~) for every K~ in the range, in order.
  std::vector<double> snr;
  /// Pooled within-cluster covariance at the chosen K~ (floored).
  MatrixXd within;
};

/// Pooled within-cluster covariance (divisor n).
MatrixXd pooled_within(const MatrixXd& x, const Partition& groups);

/// Leading q generalized discriminant directions of the groups.
MatrixXd lda_directions(const MatrixXd& x, const Partition& groups, int q, MatrixXd* within = nullptr);

/// For K~ in [k_min, k_max], cut the hierarchical tree at K~, score
/// Delta(K~) = min_{k != l} ||W~^{-1/2} (mu_k - mu_l)||, keep the largest
/// maximizer and project onto its K~ - 1 discriminant directions.
LdaResult lda_reduce(const Dataset& data, int k_min, int k_max, int k,
                     Linkage linkage = Linkage::kWard);

struct SketchResult {
  Partition partition;
  /// Indices of the subsample T.
  std::vector<Index> sketch;
  int attempts = 0;
  LasdpResult sketch_fit;
  /// Held-out points assigned at random because no strict minimizer existed.
  Index random_assignments = 0;
};

/// Bernoulli(gamma) subsample, iLA-SDP on it (hierarchical init), then each
/// held-out point goes to argmin_k log|S_k| + ||S_k^{-1/2}(x_i - xbar_k)||^2.
SketchResult sketch_and_lift(const Dataset& data, int k, double gamma, const IlasdpConfig& cfg,
                             std::uint64_t seed, Linkage linkage = Linkage::kWard);

}  // namespace lasdp
