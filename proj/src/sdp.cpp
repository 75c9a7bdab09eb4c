#include "lasdp/sdp.hpp"

#include "lasdp/error.hpp"
#include "lasdp/kernels.hpp"
#include "lasdp/linalg.hpp"
#include "lasdp/metrics.hpp"
#include "lasdp/rounding.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace lasdp {

namespace {

using Clock = std::chrono::steady_clock;
using Stack = std::vector<MatrixXd>;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

double squared_norm(const Stack& s) {
  double acc = 0.0;
  for (const auto& m : s) {
    acc += m.squaredNorm();
  }
  return acc;
}

double stack_dot(const Stack& a, const Stack& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += frobenius_dot(a[i], b[i]);
  }
  return acc;
}

bool all_finite(const Stack& s) {
  return std::all_of(s.begin(), s.end(), [](const MatrixXd& m) { return m.allFinite(); });
}

// Largest |entry| over all blocks; objectives are solved on A / scale.
double problem_scale(const Stack& a_list) {
  double scale = 0.0;
  for (const auto& a : a_list) {
    scale = std::max(scale, a.cwiseAbs().maxCoeff());
  }
  return scale > 0.0 ? scale : 1.0;
}

Stack scaled_costs(const Stack& a_list, double scale) {
  Stack c;
  c.reserve(a_list.size());
  for (const auto& a : a_list) {
    c.push_back(linalg::symmetrize(a) / scale);
  }
  return c;
}

}  // namespace

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::kConverged:
      return "converged";
    case Termination::kMaxIters:
      return "max-iters";
    case Termination::kStalled:
      return "stalled";
  }
  return "unknown";
}

std::string_view to_string(SolverKind s) { return s == SolverKind::kAdmm ? "admm" : "bm"; }

SolverKind solver_from_string(std::string_view name) {
  if (name == "admm") {
    return SolverKind::kAdmm;
  }
  if (name == "bm") {
    return SolverKind::kBm;
  }
  throw ValidationError("unknown solver '" + std::string(name) + "' (expected admm|bm)");
}

void SdpProblem::validate() const {
  if (a_list.empty()) {
    throw ValidationError("SDP problem needs at least one block");
  }
  if (k < 1) {
    throw ValidationError("SDP problem needs a positive trace target");
  }
  const Index size = a_list.front().rows();
  if (size < 2) {
    throw ValidationError("SDP problem needs n >= 2");
  }
  if (k > size) {
    throw ValidationError("trace target exceeds n");
  }
  for (const auto& a : a_list) {
    if (a.rows() != size || a.cols() != size) {
      throw DimensionMismatch("all similarity matrices must be n x n");
    }
    if (!a.allFinite()) {
      throw NumericFailure("similarity matrix has non-finite entries");
    }
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-8 * (1.0 + a.cwiseAbs().maxCoeff())) {
      throw ValidationError("similarity matrices must be symmetric");
    }
  }
}

SdpProblem SdpProblem::lasdp(std::vector<MatrixXd> a_list) {
  SdpProblem p;
  p.k = static_cast<int>(a_list.size());
  p.a_list = std::move(a_list);
  return p;
}

SdpProblem SdpProblem::kmeans(MatrixXd a, int k) {
  SdpProblem p;
  p.a_list.push_back(std::move(a));
  p.k = k;
  return p;
}

LiftedMembership BmFactor::membership(double feas_tol) const {
  std::vector<MatrixXd> z;
  z.reserve(static_cast<std::size_t>(blocks()));
  for (int b = 0; b < blocks(); ++b) {
    const MatrixXd ub = block(b);
    z.push_back(ub * ub.transpose());
  }
  return LiftedMembership(std::move(z), feas_tol);
}

void project_affine(std::vector<MatrixXd>& blocks, double trace_target) {
  // KKT solution: every block moves by mu I + (a 1^T + 1 a^T)/2 with the
  // scalar mu and vector a fixed by the n + 1 equality constraints.
  const auto b_count = static_cast<double>(blocks.size());
  const Index n = blocks.front().rows();
  const double nd = static_cast<double>(n);
  MatrixXd sum = MatrixXd::Zero(n, n);
  for (const auto& m : blocks) {
    sum += m;
  }
  const VectorXd r = VectorXd::Ones(n) - sum.rowwise().sum();
  const double t = trace_target - sum.trace();
  const double s = (r.sum() - t) / (b_count * (nd - 1.0));
  const double mu = (t - b_count * s) / (b_count * nd);
  const VectorXd a = (2.0 / (b_count * nd)) * (r.array() - b_count * mu).matrix() -
                     VectorXd::Constant(n, s / nd);
  MatrixXd shift = 0.5 * (a * VectorXd::Ones(n).transpose() + VectorXd::Ones(n) * a.transpose());
  shift.diagonal().array() += mu;
  for (auto& m : blocks) {
    m += shift;
  }
}

// ------------------------------------------------------------------- ADMM

SdpSolution solve_lasdp_admm(const SdpProblem& problem, const LiftedMembership* warm_start) {
  problem.validate();
  const auto start = Clock::now();
  const AdmmOptions& opt = problem.admm;
  const int b_count = problem.blocks();
  const Index n = problem.n();
  const double trace_target = problem.k;
  const double scale = problem_scale(problem.a_list);
  const Stack cost = scaled_costs(problem.a_list, scale);

  Stack zbar;
  if (warm_start != nullptr && warm_start->k() == b_count && warm_start->n() == n) {
    zbar = warm_start->blocks();
  } else {
    zbar.assign(static_cast<std::size_t>(b_count), MatrixXd::Zero(n, n));
    project_affine(zbar, trace_target);
  }
  Stack x_psd = zbar, x_pos = zbar, x_aff = zbar;
  Stack u_psd(zbar.size(), MatrixXd::Zero(n, n));
  Stack u_pos = u_psd, u_aff = u_psd;
  Stack previous = zbar;
  Stack best = zbar;
  double best_residual = std::numeric_limits<double>::infinity();

  double rho = opt.rho;
  int since_adapt = 0;
  int stall_count = 0;
  double last_objective = std::numeric_limits<double>::quiet_NaN();

  SolveReport report;
  report.termination = Termination::kMaxIters;
  const double sqrt3 = std::sqrt(3.0);

  for (int it = 1; it <= opt.max_iters; ++it) {
    for (std::size_t b = 0; b < zbar.size(); ++b) {
      x_psd[b] = zbar[b] - u_psd[b];
      x_pos[b] = (zbar[b] - u_pos[b]).cwiseMax(0.0);
      x_aff[b] = zbar[b] - u_aff[b] + cost[b] / rho;
    }
    kernels::project_psd_blocks(x_psd);
    project_affine(x_aff, trace_target);

    previous.swap(zbar);
    double primal_sq = 0.0;
    double dual_sq = 0.0;
    for (std::size_t b = 0; b < zbar.size(); ++b) {
      zbar[b] = (x_psd[b] + u_psd[b] + x_pos[b] + u_pos[b] + x_aff[b] + u_aff[b]) / 3.0;
      zbar[b] = linalg::symmetrize(zbar[b]);
      u_psd[b] += x_psd[b] - zbar[b];
      u_pos[b] += x_pos[b] - zbar[b];
      u_aff[b] += x_aff[b] - zbar[b];
      primal_sq += (x_psd[b] - zbar[b]).squaredNorm() + (x_pos[b] - zbar[b]).squaredNorm() +
                   (x_aff[b] - zbar[b]).squaredNorm();
      dual_sq += (zbar[b] - previous[b]).squaredNorm();
    }
    if (!all_finite(zbar)) {
      throw NumericFailure("ADMM iterate became non-finite at iteration " + std::to_string(it));
    }

    const double primal = std::sqrt(primal_sq);
    const double dual = rho * sqrt3 * std::sqrt(dual_sq);
    const double x_norm = std::sqrt(squared_norm(x_psd) + squared_norm(x_pos) + squared_norm(x_aff));
    const double primal_rel = primal / std::max({1.0, x_norm, sqrt3 * std::sqrt(squared_norm(zbar))});
    const double u_norm =
        rho * std::sqrt(squared_norm(u_psd) + squared_norm(u_pos) + squared_norm(u_aff));
    const double dual_rel = dual / std::max(1.0, u_norm);

    const double objective = stack_dot(cost, x_aff) * scale;
    report.objective_trace.push_back(objective);
    report.iterations = it;
    report.primal_residual = primal_rel;
    report.dual_residual = dual_rel;

    const double residual = std::max(primal_rel, dual_rel);
    if (residual < best_residual) {
      best_residual = residual;
      best = zbar;
    }
    if (residual <= opt.tol) {
      report.termination = Termination::kConverged;
      best = zbar;
      break;
    }
    if (std::abs(objective - last_objective) < opt.stall_delta * (1.0 + std::abs(objective))) {
      if (++stall_count >= opt.stall_window) {
        report.termination = Termination::kStalled;
        break;
      }
    } else {
      stall_count = 0;
    }
    last_objective = objective;

    if (opt.adapt_rho && it <= opt.adapt_until && ++since_adapt >= opt.adapt_every) {
      double factor = 1.0;
      if (primal_rel > opt.balance_ratio * dual_rel) {
        factor = opt.rho_factor;
      } else if (dual_rel > opt.balance_ratio * primal_rel) {
        factor = 1.0 / opt.rho_factor;
      }
      if (factor != 1.0) {
        rho *= factor;
        for (std::size_t b = 0; b < zbar.size(); ++b) {
          u_psd[b] /= factor;
          u_pos[b] /= factor;
          u_aff[b] /= factor;
        }
        since_adapt = 0;
      }
    }
  }

  project_affine(best, trace_target);
  for (auto& m : best) {
    m = linalg::symmetrize(m);
  }
  SdpSolution out;
  out.objective = stack_dot(cost, best) * scale;
  out.z = LiftedMembership(std::move(best), 1e-4);
  report.wall_ms = elapsed_ms(start);
  out.report = std::move(report);
  return out;
}

// -------------------------------------------------------- Burer-Monteiro

namespace {

// Augmented Lagrangian pieces for one U.
struct BmState {
  MatrixXd u;
  MatrixXd cu;      // [C_1 U_1 | ... | C_B U_B]
  VectorXd g;       // U U^T 1 - 1
  double f = 0.0;   // sum_b <C_b, U_b U_b^T>
  double lag = 0.0;
};

class BmModel {
 public:
  BmModel(const Stack& cost, const std::vector<FactoredCost>& factors, double scale, Index width,
          double trace_target)
      : cost_(cost), width_(width), trace_(trace_target) {
    if (factors.size() == cost.size()) {
      for (const auto& fc : factors) {
        f_.push_back(fc.f);
        g_.push_back(linalg::symmetrize(fc.g) / scale);
      }
    }
  }

  void evaluate(BmState& s, const VectorXd& y, double beta) const {
    const Index n = s.u.rows();
    s.cu.resize(n, s.u.cols());
    s.f = 0.0;
    for (std::size_t b = 0; b < cost_.size(); ++b) {
      const auto ub = s.u.middleCols(static_cast<Index>(b) * width_, width_);
      auto cub = s.cu.middleCols(static_cast<Index>(b) * width_, width_);
      if (f_.empty()) {
        cub.noalias() = cost_[b] * ub;
      } else {
        const MatrixXd ftu = f_[b].transpose() * ub;
        cub.noalias() = f_[b] * (g_[b] * ftu);
      }
      s.f += ub.cwiseProduct(cub).sum();
    }
    const VectorXd colsum = s.u.colwise().sum().transpose();
    s.g = s.u * colsum - VectorXd::Ones(n);
    s.lag = s.f - y.dot(s.g) - 0.5 * beta * s.g.squaredNorm();
  }

  MatrixXd gradient(const BmState& s, const VectorXd& y, double beta) const {
    const VectorXd q = y + beta * s.g;
    const VectorXd colsum = s.u.colwise().sum().transpose();
    const VectorXd uq = s.u.transpose() * q;
    MatrixXd grad = 2.0 * s.cu;
    grad.noalias() -= q * colsum.transpose();
    grad.rowwise() -= uq.transpose();
    return grad;
  }

  // Nearest point of {U >= 0, ||U||_F^2 = trace}.
  MatrixXd project(const MatrixXd& v) const {
    MatrixXd pos = v.cwiseMax(0.0);
    const double norm = pos.norm();
    if (!(norm > 0.0)) {
      pos.setConstant(1.0);
      return pos * std::sqrt(trace_) / pos.norm();
    }
    return pos * (std::sqrt(trace_) / norm);
  }

 private:
  const Stack& cost_;
  Stack f_;
  Stack g_;
  Index width_;
  double trace_;
};

MatrixXd spectral_init(const Stack& cost, Index cols, double noise, std::mt19937_64& rng) {
  const Index n = cost.front().rows();
  MatrixXd avg = MatrixXd::Zero(n, n);
  for (const auto& c : cost) {
    avg += c;
  }
  avg /= static_cast<double>(cost.size());
  const Index r = std::min(cols, n);
  const linalg::SymEigen top = linalg::sym_eigen_top(avg, r);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  MatrixXd u(n, cols);
  const double base = noise / std::sqrt(static_cast<double>(n));
  for (Index j = 0; j < cols; ++j) {
    VectorXd v = VectorXd::Zero(n);
    if (j < r) {
      // Descending order; flip so the positive part carries more mass.
      v = top.vectors.col(r - 1 - j);
      if (v.cwiseMax(0.0).squaredNorm() < (-v).cwiseMax(0.0).squaredNorm()) {
        v = -v;
      }
      v = v.cwiseMax(0.0);
    }
    for (Index i = 0; i < n; ++i) {
      u(i, j) = v(i) + base * unif(rng);
    }
  }
  return u;
}

// Start from an integral feasible point: cluster the spectral embedding of
// the average cost, then pair clusters with blocks by maximum total
// <C_b, lift(G_j)>. Every block starts with mass, which matters because
// U_b = 0 is a stationary point of the factored problem.
MatrixXd cluster_init(const Stack& cost, Index width, int k, double noise, std::mt19937_64& rng) {
  const Index n = cost.front().rows();
  const int b_count = static_cast<int>(cost.size());
  MatrixXd avg = MatrixXd::Zero(n, n);
  for (const auto& c : cost) {
    avg += c;
  }
  avg /= static_cast<double>(b_count);
  const Partition groups = spectral_round(avg, k, rng(), 5);
  const auto members = groups.members();

  std::vector<int> block_group(static_cast<std::size_t>(b_count), -1);
  std::vector<Index> first_col(static_cast<std::size_t>(b_count), 0);
  if (b_count == 1) {
    block_group.clear();
  } else {
    MatrixXd weight = MatrixXd::Zero(b_count, std::max(b_count, k));
    for (int b = 0; b < b_count; ++b) {
      for (int j = 0; j < k; ++j) {
        const auto& g = members[static_cast<std::size_t>(j)];
        double acc = 0.0;
        for (Index i : g) {
          for (Index l : g) {
            acc += cost[static_cast<std::size_t>(b)](i, l);
          }
        }
        weight(b, j) = g.empty() ? 0.0 : acc / static_cast<double>(g.size());
      }
    }
    if (weight.rows() == weight.cols()) {
      block_group = max_weight_assignment(weight);
    }
  }

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double base = noise / std::sqrt(static_cast<double>(n));
  MatrixXd u(n, width * b_count);
  for (Index i = 0; i < u.rows(); ++i) {
    for (Index j = 0; j < u.cols(); ++j) {
      u(i, j) = base * unif(rng);
    }
  }
  auto place = [&](Index col, int j) {
    if (j < 0 || j >= k) {
      return;
    }
    const auto& g = members[static_cast<std::size_t>(j)];
    for (Index i : g) {
      u(i, col) += 1.0 / std::sqrt(static_cast<double>(g.size()));
    }
  };
  if (b_count == 1) {
    for (int j = 0; j < k && j < width; ++j) {
      place(j, j);
    }
  } else {
    for (int b = 0; b < b_count; ++b) {
      place(b * width, block_group[static_cast<std::size_t>(b)]);
    }
  }
  return u;
}

}  // namespace

namespace {

struct BmRun {
  BmState state;
  SolveReport report;
};

BmRun run_augmented_lagrangian(const BmModel& model, MatrixXd u0, const BmOptions& opt,
                               double scale) {
  BmState cur;
  cur.u = std::move(u0);
  const Index n = cur.u.rows();
  VectorXd y = VectorXd::Zero(n);
  double beta = opt.penalty;
  model.evaluate(cur, y, beta);
  double prev_feas = cur.g.cwiseAbs().maxCoeff();
  const double initial_step = 1.0 / std::max(1.0, static_cast<double>(n));
  double step = initial_step;

  SolveReport report;
  report.termination = Termination::kMaxIters;
  int total_inner = 0;
  int stall_count = 0;
  double last_objective = std::numeric_limits<double>::quiet_NaN();

  for (int outer = 1; outer <= opt.max_outer; ++outer) {
    MatrixXd grad = model.gradient(cur, y, beta);
    bool inner_done = false;
    step = std::max(step, initial_step);
    for (int inner = 0; inner < opt.max_inner; ++inner) {
      ++total_inner;
      BmState cand;
      bool accepted = false;
      while (step > 1e-14) {
        cand.u = model.project(cur.u + step * grad);
        model.evaluate(cand, y, beta);
        if (cand.lag >= cur.lag) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) {
        inner_done = true;
        break;
      }
      const MatrixXd s_diff = cand.u - cur.u;
      const double move = s_diff.norm() / std::max(1.0, cur.u.norm());
      const double gain = cand.lag - cur.lag;
      MatrixXd cand_grad = model.gradient(cand, y, beta);
      // Barzilai-Borwein step for the next trial.
      const double sy = std::abs(s_diff.cwiseProduct(cand_grad - grad).sum());
      const double ss = s_diff.squaredNorm();
      step = sy > 0.0 ? std::clamp(ss / sy, 1e-10, 1e10) : step * 2.0;
      cur = std::move(cand);
      grad = std::move(cand_grad);
      if (!cur.u.allFinite()) {
        throw NumericFailure("BM iterate became non-finite");
      }
      if (move < opt.inner_tol || gain <= 1e-15 * (1.0 + std::abs(cur.lag))) {
        inner_done = true;
        break;
      }
    }

    const double feas = cur.g.cwiseAbs().maxCoeff();
    const double objective = cur.f * scale;
    report.objective_trace.push_back(objective);
    report.iterations = outer;
    report.primal_residual = feas;
    report.dual_residual = 0.0;
    if (feas <= opt.feas_tol && inner_done) {
      report.termination = Termination::kConverged;
      break;
    }
    if (std::abs(objective - last_objective) < 1e-12 * (1.0 + std::abs(objective)) &&
        feas > opt.feas_tol && beta >= opt.max_penalty) {
      if (++stall_count >= 100) {
        report.termination = Termination::kStalled;
        break;
      }
    } else {
      stall_count = 0;
    }
    last_objective = objective;

    y += beta * cur.g;
    if (feas > 0.25 * prev_feas) {
      beta = std::min(beta * opt.penalty_growth, opt.max_penalty);
    }
    prev_feas = feas;
    model.evaluate(cur, y, beta);
  }
  report.inner_iterations = total_inner;
  return {std::move(cur), std::move(report)};
}

// Converged runs beat unconverged ones; then the larger objective wins.
bool better_run(const BmRun& a, const BmRun& b, double feas_tol) {
  const bool fa = a.report.primal_residual <= feas_tol;
  const bool fb = b.report.primal_residual <= feas_tol;
  if (fa != fb) {
    return fa;
  }
  if (!fa) {
    return a.report.primal_residual < b.report.primal_residual;
  }
  return a.state.f > b.state.f;
}

}  // namespace

SdpSolution solve_lasdp_bm(const SdpProblem& problem, int rank_factor, std::uint64_t seed,
                           const BmFactor* warm_start) {
  problem.validate();
  if (rank_factor < 1) {
    throw ValidationError("rank factor s must be >= 1");
  }
  const auto start = Clock::now();
  const BmOptions& opt = problem.bm;
  const int b_count = problem.blocks();
  const Index n = problem.n();
  const double trace_target = problem.k;
  // The single-block problem keeps r = s K columns in its only block.
  const Index width = b_count == 1 ? static_cast<Index>(rank_factor) * problem.k : rank_factor;
  const Index cols = width * b_count;
  const double scale = problem_scale(problem.a_list);
  const Stack cost = scaled_costs(problem.a_list, scale);
  const BmModel model(cost, problem.factors, scale, width, trace_target);

  std::mt19937_64 rng(seed);
  std::vector<MatrixXd> starts;
  if (warm_start != nullptr && warm_start->u.rows() == n && warm_start->u.cols() == cols) {
    starts.push_back(model.project(warm_start->u));
  } else {
    const bool paired = b_count == 1 || b_count == problem.k;
    for (int r = 0; r < std::max(1, opt.restarts); ++r) {
      // Alternate clustering-based and spectral starts.
      const bool spectral = !paired || r % 2 == 1;
      starts.push_back(model.project(spectral
                                         ? spectral_init(cost, cols, opt.init_noise, rng)
                                         : cluster_init(cost, width, problem.k, opt.init_noise, rng)));
    }
  }

  std::optional<BmRun> best;
  int total_iterations = 0;
  int total_inner = 0;
  for (auto& u0 : starts) {
    BmRun run = run_augmented_lagrangian(model, std::move(u0), opt, scale);
    total_iterations += run.report.iterations;
    total_inner += run.report.inner_iterations;
    if (!best || better_run(run, *best, opt.feas_tol)) {
      best = std::move(run);
    }
  }
  SolveReport report = std::move(best->report);
  report.iterations = total_iterations;
  report.inner_iterations = total_inner;

  BmFactor factor{std::move(best->state.u), width};
  SdpSolution out;
  out.z = factor.membership(1e-3);
  out.objective = best->state.f * scale;
  out.factor = std::move(factor);
  report.wall_ms = elapsed_ms(start);
  out.report = std::move(report);
  return out;
}

KmeansSdpSolution solve_kmeans_sdp(const MatrixXd& a, int k, SolverKind solver,
                                   const AdmmOptions& admm, const BmOptions& bm, int rank_factor,
                                   std::uint64_t seed) {
  SdpProblem problem = SdpProblem::kmeans(a, k);
  problem.admm = admm;
  problem.bm = bm;
  SdpSolution sol = solver == SolverKind::kAdmm ? solve_lasdp_admm(problem)
                                                : solve_lasdp_bm(problem, rank_factor, seed);
  return {sol.z.block(0), std::move(sol.report), sol.objective};
}

}  // namespace lasdp
