#include "lasdp/pipeline.hpp"

#include "lasdp/error.hpp"
#include "lasdp/kernels.hpp"
#include "lasdp/likelihood.hpp"
#include "lasdp/linalg.hpp"
#include "lasdp/random.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace lasdp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kMassTol = 1e-8;

// Stream ids for derive_seed.
constexpr std::uint64_t kRoundStream = 1;
constexpr std::uint64_t kSolverStream = 2;

void check_config(const IlasdpConfig& cfg) {
  if (cfg.max_outer < 1) {
    throw ValidationError("iLA-SDP needs S >= 1");
  }
  if (!(cfg.eps > 0.0)) {
    throw ValidationError("iLA-SDP needs eps > 0");
  }
  if (cfg.rank_factor < 1) {
    throw ValidationError("rank factor must be >= 1");
  }
}

SdpProblem build_problem(const Dataset& data, const std::vector<MatrixXd>& covariances,
                         const IlasdpConfig& cfg, SolverKind solver) {
  SdpProblem problem = SdpProblem::lasdp(similarity_matrices(data, covariances));
  if (solver == SolverKind::kBm) {
    for (const auto& s : covariances) {
      problem.factors.push_back(similarity_factors(data, s));
    }
  }
  problem.admm = cfg.admm;
  problem.bm = cfg.bm;
  return problem;
}

SdpSolution solve(const SdpProblem& problem, SolverKind solver, const IlasdpConfig& cfg,
                  int iteration, const LiftedMembership* warm_z, const BmFactor* warm_u) {
  if (solver == SolverKind::kAdmm) {
    return solve_lasdp_admm(problem, warm_z);
  }
  return solve_lasdp_bm(problem, cfg.rank_factor,
                        derive_seed(cfg.seed, kSolverStream, static_cast<std::uint64_t>(iteration)),
                        warm_u);
}

Partition round(const LiftedMembership& z, const IlasdpConfig& cfg) {
  return round_membership(z, cfg.rounding, derive_seed(cfg.seed, kRoundStream),
                          cfg.round_restarts);
}

double rounded_loglik(const Dataset& data, const Partition& p) {
  if (p.has_empty_cluster()) {
    return kNaN;
  }
  try {
    return profile_loglik(data, p, init_cov_from_partition(data, p));
  } catch (const Error&) {
    return kNaN;
  }
}

LasdpResult single_cluster(const Dataset& data) {
  LasdpResult out;
  out.partition = Partition(std::vector<int>(static_cast<std::size_t>(data.n()), 0), 1);
  out.z = lift(out.partition);
  out.covariances = init_cov_from_partition(data, out.partition);
  out.report.termination = Termination::kConverged;
  out.objective = profile_loglik(data, out.partition, out.covariances);
  out.trace.objective.push_back(out.objective);
  out.trace.r.push_back(kNaN);
  out.trace.loglik.push_back(out.objective);
  out.trace.iterations = 1;
  out.trace.converged = true;
  return out;
}

LasdpResult run_ilasdp(const Dataset& data, std::vector<MatrixXd> covs,
                       std::optional<LiftedMembership> z_prev, const IlasdpConfig& cfg) {
  check_config(cfg);
  const int k = static_cast<int>(covs.size());
  if (k == 1) {
    return single_cluster(data);
  }
  const SolverKind solver = resolve_solver(cfg, data.n());
  const MatrixXd& x = data.x();

  LasdpResult out;
  std::optional<LiftedMembership> z_cur;
  std::optional<BmFactor> factor;
  int solver_iterations = 0;

  for (int s = 1; s <= cfg.max_outer; ++s) {
    const SdpProblem problem = build_problem(data, covs, cfg, solver);
    // Warm starts begin at s = 2 so the first pass equals the oracle solve.
    SdpSolution sol = solve(problem, solver, cfg, s, s >= 2 ? &*z_cur : nullptr,
                            s >= 2 && factor ? &*factor : nullptr);
    solver_iterations += sol.report.iterations;
    out.report = sol.report;

    LiftedMembership z_new = std::move(sol.z);
    if (s >= 2) {
      // An inexact solve may land below the previous iterate; keep the better one.
      const double old_value = lifted_objective(problem.a_list, *z_cur);
      const double new_value = lifted_objective(problem.a_list, z_new);
      if (new_value < old_value) {
        z_new = *z_cur;
      } else if (sol.factor) {
        factor = std::move(sol.factor);
      }
    } else if (sol.factor) {
      factor = std::move(sol.factor);
    }

    // Covariance step, block by block; a floored update that does not improve
    // the block objective is discarded.
    double total = 0.0;
    for (int b = 0; b < k; ++b) {
      const MatrixXd& zk = z_new.block(b);
      const double mass = zk.sum();
      const MatrixXd scatter = kernels::scatter(x, zk);
      MatrixXd& sigma = covs[static_cast<std::size_t>(b)];
      double value = block_objective(scatter, mass, sigma);
      if (!(mass > kMassTol)) {
        if (s == 1) {
          throw EmptySoftCluster("iLA-SDP iteration 1, block " + std::to_string(b + 1) +
                                 ": soft cluster mass " + std::to_string(mass));
        }
      } else {
        const MatrixXd candidate = linalg::apply_psd_floor(scatter / mass);
        const double cand_value = block_objective(scatter, mass, candidate);
        if (cand_value >= value) {
          sigma = candidate;
          value = cand_value;
        }
      }
      total += value;
    }

    out.trace.objective.push_back(total);
    const std::optional<LiftedMembership>& base = s >= 2 ? z_cur : z_prev;
    double r = kNaN;
    if (base) {
      const MatrixXd prev_sum = base->sum();
      r = (z_new.sum() - prev_sum).norm() / std::max(prev_sum.norm(), 1e-300);
    }
    out.trace.r.push_back(r);
    out.trace.loglik.push_back(cfg.record_loglik ? rounded_loglik(data, round(z_new, cfg)) : kNaN);
    out.trace.iterations = s;
    const std::size_t m = out.trace.objective.size();
    if (m >= 2) {
      const double prev = out.trace.objective[m - 2];
      if (total < prev - cfg.mono_tol * (1.0 + std::abs(prev))) {
        out.trace.monotone = false;
      }
    }

    z_cur = std::move(z_new);
    if (std::isinf(cfg.eps) || (s >= 2 && r < cfg.eps)) {
      out.trace.converged = true;
      break;
    }
  }

  out.report.iterations = solver_iterations;
  out.objective = out.trace.objective.back();
  out.partition = round(*z_cur, cfg);
  out.z = std::move(*z_cur);
  out.covariances = std::move(covs);
  return out;
}

}  // namespace

SolverKind resolve_solver(const IlasdpConfig& cfg, Index n) {
  if (cfg.solver) {
    return *cfg.solver;
  }
  return n > 300 ? SolverKind::kBm : SolverKind::kAdmm;
}

void write_trace_csv(std::ostream& out, const IlasdpTrace& trace) {
  out << "iteration,objective,r,loglik\n";
  out.precision(12);
  for (std::size_t s = 0; s < trace.objective.size(); ++s) {
    out << (s + 1) << ',' << trace.objective[s] << ',';
    if (std::isfinite(trace.r[s])) {
      out << trace.r[s];
    }
    out << ',';
    if (std::isfinite(trace.loglik[s])) {
      out << trace.loglik[s];
    }
    out << '\n';
  }
}

double block_objective(const MatrixXd& scatter, double mass, const MatrixXd& sigma) {
  const linalg::SpdFactor f(sigma);
  return -mass * f.logdet() - f.inverse().cwiseProduct(scatter).sum();
}

LasdpResult oracle_lasdp(const Dataset& data, const std::vector<MatrixXd>& covariances,
                         const IlasdpConfig& cfg) {
  check_config(cfg);
  const int k = static_cast<int>(covariances.size());
  if (k < 1) {
    throw ValidationError("oracle LA-SDP needs at least one covariance");
  }
  if (k == 1) {
    LasdpResult out = single_cluster(data);
    out.covariances = covariances;
    return out;
  }
  const SolverKind solver = resolve_solver(cfg, data.n());
  const SdpProblem problem = build_problem(data, covariances, cfg, solver);
  SdpSolution sol = solve(problem, solver, cfg, 1, nullptr, nullptr);
  LasdpResult out;
  out.partition = round(sol.z, cfg);
  out.objective = sol.objective;
  out.z = std::move(sol.z);
  out.report = std::move(sol.report);
  out.covariances = covariances;
  out.trace.objective.push_back(out.objective);
  out.trace.r.push_back(kNaN);
  out.trace.loglik.push_back(cfg.record_loglik ? rounded_loglik(data, out.partition) : kNaN);
  out.trace.iterations = 1;
  out.trace.converged = true;
  return out;
}

LasdpResult ilasdp(const Dataset& data, const Partition& init, const IlasdpConfig& cfg) {
  if (init.n() != data.n()) {
    throw DimensionMismatch("iLA-SDP: init partition size differs from sample count");
  }
  if (init.has_empty_cluster()) {
    throw DegeneratePartition("iLA-SDP: init partition has an empty cluster");
  }
  return run_ilasdp(data, init_cov_from_partition(data, init), lift(init), cfg);
}

LasdpResult ilasdp(const Dataset& data, const std::vector<MatrixXd>& init_covariances,
                   const IlasdpConfig& cfg) {
  if (init_covariances.empty()) {
    throw ValidationError("iLA-SDP needs at least one initial covariance");
  }
  for (const auto& s : init_covariances) {
    linalg::SpdFactor check(s);
  }
  return run_ilasdp(data, init_covariances, std::nullopt, cfg);
}

std::vector<MatrixXd> init_cov_from_partition(const Dataset& data, const Partition& partition) {
  if (partition.n() != data.n()) {
    throw DimensionMismatch("init_cov_from_partition: partition size differs from sample count");
  }
  const auto members = partition.members();
  std::vector<MatrixXd> out;
  out.reserve(members.size());
  for (std::size_t k = 0; k < members.size(); ++k) {
    if (members[k].empty()) {
      throw DegeneratePartition("cluster " + std::to_string(k + 1) + " is empty");
    }
    MatrixXd pts(data.p(), static_cast<Index>(members[k].size()));
    for (std::size_t j = 0; j < members[k].size(); ++j) {
      pts.col(static_cast<Index>(j)) = data.x().col(members[k][j]);
    }
    const VectorXd mean = pts.rowwise().mean();
    const MatrixXd centered = pts.colwise() - mean;
    out.push_back(linalg::apply_psd_floor(centered * centered.transpose() /
                                          static_cast<double>(pts.cols())));
  }
  return out;
}

}  // namespace lasdp
