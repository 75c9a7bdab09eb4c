#pragma once

// Oracle LA-SDP (known covariances) and the iterative iLA-SDP driver that
// alternates the relaxed solve with the closed-form covariance update.

#include "lasdp/core.hpp"
#include "lasdp/rounding.hpp"
#include "lasdp/sdp.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

namespace lasdp {

struct IlasdpConfig {
  /// S, the maximum number of outer iterations.
  int max_outer = 50;
  /// Stop once r^(s) < eps. Infinity means exactly one outer iteration.
  double eps = 1e-2;
  /// Unset: BM when n > 300, ADMM otherwise.
  std::optional<SolverKind> solver;
  int rank_factor = 2;
  std::uint64_t seed = 0;
  /// Also round every iterate and record the profile log-likelihood of the hard partition.
  bool record_loglik = false;
  Rounding rounding = Rounding::kSpectral;
  int round_restarts = 10;
  AdmmOptions admm;
  BmOptions bm;
  /// Relative tolerance of the monotonicity self-check.
  double mono_tol = 1e-6;
};

SolverKind resolve_solver(const IlasdpConfig& cfg, Index n);

struct IlasdpTrace {
  /// sum_k <A^(k)(Sigma_k^(s)), Z_k^(s)> after each outer iteration.
  std::vector<double> objective;
  /// Profile log-likelihood of the rounded iterate (NaN when not recorded or degenerate).
  std::vector<double> loglik;
  /// ||Z~^(s) - Z~^(s-1)||_F / ||Z~^(s-1)||_F; NaN when there is no previous iterate.
  std::vector<double> r;
  int iterations = 0;
  bool converged = false;
  /// False if the objective ever dropped by more than mono_tol (1 + |value|).
  bool monotone = true;
};

void write_trace_csv(std::ostream& out, const IlasdpTrace& trace);

struct LasdpResult {
  Partition partition;
  LiftedMembership z;
  /// Report of the last relaxed solve; iterations summed over all solves.
  SolveReport report;
  double objective = 0.0;
  std::vector<MatrixXd> covariances;
  IlasdpTrace trace;
};

/// Similarity matrices from the given covariances, one relaxed solve, rounding.
LasdpResult oracle_lasdp(const Dataset& data, const std::vector<MatrixXd>& covariances,
                         const IlasdpConfig& cfg);

/// Iterate from an initial partition (covariances taken from its clusters).
LasdpResult ilasdp(const Dataset& data, const Partition& init, const IlasdpConfig& cfg);
/// Iterate from initial covariances.
LasdpResult ilasdp(const Dataset& data, const std::vector<MatrixXd>& init_covariances,
                   const IlasdpConfig& cfg);

/// Within-cluster sample covariances (divisor |G_k|), PSD-floored.
std::vector<MatrixXd> init_cov_from_partition(const Dataset& data, const Partition& partition);

/// The relaxed objective of one block as a function of its covariance:
/// -(1'Z_k 1) log|Sigma| - tr(Sigma^-1 S) with S the scatter of Z_k.
double block_objective(const MatrixXd& scatter, double mass, const MatrixXd& sigma);

}  // namespace lasdp
