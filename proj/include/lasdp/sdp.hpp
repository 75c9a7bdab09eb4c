#pragma once

// Solvers for the likelihood-adjusted SDP
//
//   max  sum_b <A_b, Z_b>
//   s.t. sum_b tr(Z_b) = K,  (sum_b Z_b) 1 = 1,  Z_b >= 0,  Z_b PSD
//
// and its single-block special case (the K-means SDP, one block with trace
// target K). Both solvers maximize and work on an internally rescaled copy of
// the A_b; reported objectives are in the caller's units.

#include "lasdp/core.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace lasdp {

enum class Termination { kConverged, kMaxIters, kStalled };

std::string_view to_string(Termination t);

struct SolveReport {
  std::vector<double> objective_trace;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
  /// Inner (projected-gradient) steps; BM only.
  int inner_iterations = 0;
  double wall_ms = 0.0;
  Termination termination = Termination::kMaxIters;
};

/// Consensus ADMM over three copies of the stacked blocks (PSD cone,
/// nonnegative orthant, affine set).
struct AdmmOptions {
  double rho = 1.0;
  int max_iters = 10000;
  /// Stop when max(primal, dual) relative residual <= tol.
  double tol = 1e-5;
  bool adapt_rho = true;
  /// Rescale rho by `rho_factor` when one residual exceeds the other by this ratio.
  double balance_ratio = 10.0;
  double rho_factor = 2.0;
  /// Iterations between rho updates; adaptation stops after adapt_until iterations.
  int adapt_every = 50;
  int adapt_until = 10000;
  int stall_window = 100;
  double stall_delta = 1e-12;
};

/// Augmented Lagrangian on U U^T 1 = 1 with projected gradient ascent onto
/// {U >= 0, ||U||_F^2 = K}.
struct BmOptions {
  int max_outer = 300;
  int max_inner = 400;
  /// Target for ||U U^T 1 - 1||_inf.
  double feas_tol = 1e-5;
  /// Inner loop stops when the relative projected step falls below this.
  double inner_tol = 1e-9;
  double penalty = 10.0;
  double penalty_growth = 2.0;
  double max_penalty = 1e8;
  double init_noise = 1e-2;
  /// Independent starts without a warm start; the best feasible run is kept.
  /// Starts alternate between a clustering-based and a spectral initializer.
  int restarts = 3;
};

/// A = F G F^T with F n x m and G m x m symmetric, m << n.
struct FactoredCost {
  MatrixXd f;
  MatrixXd g;

  MatrixXd dense() const { return f * g * f.transpose(); }
};

struct SdpProblem {
  std::vector<MatrixXd> a_list;
  /// Optional low-rank form of each A_b. When present (one per block) the BM
  /// solver multiplies through the factors; ADMM always uses a_list.
  std::vector<FactoredCost> factors;
  /// Trace target (the cluster count K).
  int k = 0;
  AdmmOptions admm;
  BmOptions bm;

  Index n() const { return a_list.empty() ? 0 : a_list.front().rows(); }
  int blocks() const { return static_cast<int>(a_list.size()); }
  /// Throws DimensionMismatch / ValidationError.
  void validate() const;

  /// K blocks, trace target K.
  static SdpProblem lasdp(std::vector<MatrixXd> a_list);
  /// One block, trace target k.
  static SdpProblem kmeans(MatrixXd a, int k);
};

/// Low-rank factor U = [U_1 | ... | U_B], each block `block_width` columns.
struct BmFactor {
  MatrixXd u;
  Index block_width = 0;

  int blocks() const { return block_width == 0 ? 0 : static_cast<int>(u.cols() / block_width); }
  auto block(int b) const { return u.middleCols(b * block_width, block_width); }
  LiftedMembership membership(double feas_tol = 1e-4) const;
};

struct SdpSolution {
  LiftedMembership z;
  SolveReport report;
  /// sum_b <A_b, Z_b> at the returned point.
  double objective = 0.0;
  std::optional<BmFactor> factor;
};

/// Throws NumericFailure if the iterates become non-finite. Non-convergence
/// returns the best iterate with termination kMaxIters.
SdpSolution solve_lasdp_admm(const SdpProblem& problem,
                             const LiftedMembership* warm_start = nullptr);

/// Rank factor s: each block gets s columns (s * K for the single-block problem).
SdpSolution solve_lasdp_bm(const SdpProblem& problem, int rank_factor, std::uint64_t seed,
                           const BmFactor* warm_start = nullptr);

enum class SolverKind { kAdmm, kBm };

std::string_view to_string(SolverKind s);
SolverKind solver_from_string(std::string_view name);

struct KmeansSdpSolution {
  MatrixXd z;
  SolveReport report;
  double objective = 0.0;
};

/// max <A, Z> s.t. tr(Z) = k, Z 1 = 1, Z >= 0, Z PSD.
KmeansSdpSolution solve_kmeans_sdp(const MatrixXd& a, int k, SolverKind solver = SolverKind::kAdmm,
                                   const AdmmOptions& admm = {}, const BmOptions& bm = {},
                                   int rank_factor = 2, std::uint64_t seed = 0);

/// Frobenius projection of the stacked blocks onto
/// { sum_b tr(Z_b) = trace_target, (sum_b Z_b) 1 = 1 } within symmetric matrices.
void project_affine(std::vector<MatrixXd>& blocks, double trace_target);

}  // namespace lasdp
