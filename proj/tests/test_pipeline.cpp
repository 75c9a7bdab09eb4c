#include "doctest.h"

#include "lasdp/baselines.hpp"
#include "lasdp/error.hpp"
#include "lasdp/generators.hpp"
#include "lasdp/metrics.hpp"
#include "lasdp/pipeline.hpp"
#include "oracles.hpp"

#include <limits>
#include <sstream>

using namespace lasdp;

namespace {

Dataset hetero(Index n, double lambda, std::uint64_t seed, int k = 3) {
  return generate({.family = Family::kHeteroSimplex, .n = n, .p = 4, .k = k, .lambda = lambda,
                   .cond = 10.0, .seed = seed});
}

Partition truth_of(const Dataset& d, int k) { return Partition(*d.true_labels(), k); }

}  // namespace

TEST_CASE("initial covariances") {
  SUBCASE("two points at 0 and 2 have variance 1") {
    MatrixXd x(1, 2);
    x << 0, 2;
    const auto s = init_cov_from_partition(Dataset(x), Partition({0, 0}, 1));
    CHECK(s[0](0, 0) == doctest::Approx(1.0));
  }
  SUBCASE("singletons are floored above zero") {
    MatrixXd x(2, 2);
    x << 1, 2, 3, 4;
    for (const auto& s : init_cov_from_partition(Dataset(x), Partition({0, 1}, 2))) {
      const double lo = Eigen::SelfAdjointEigenSolver<MatrixXd>(s).eigenvalues().minCoeff();
      CHECK(lo > 0.0);
      CHECK(lo < 1e-10);
    }
  }
  SUBCASE("large Gaussian sample approaches the population covariance") {
    const GeneratorSpec spec{.family = Family::kHeteroSimplex, .n = 5000, .p = 4, .k = 1,
                             .lambda = 1.0, .cond = 10.0, .seed = 3};
    const Dataset d = generate(spec);
    const auto s = init_cov_from_partition(d, truth_of(d, 1));
    const MatrixXd pop = family_params(spec).covariances[0];
    CHECK((s[0] - pop).norm() <= 0.1 * pop.norm());
  }
  SUBCASE("empty cluster") {
    CHECK_THROWS_AS(init_cov_from_partition(Dataset(MatrixXd::Ones(1, 3)), Partition({0, 0, 0}, 2)),
                    DegeneratePartition);
  }
}

TEST_CASE("oracle LA-SDP") {
  SUBCASE("isotropic covariances and distant clusters") {
    const Dataset d = oracle::separated_blobs(10, 2, 2, 20.0, 4);
    const std::vector<MatrixXd> covs(2, 0.01 * MatrixXd::Identity(2, 2));
    const auto r = oracle_lasdp(d, covs, {});
    CHECK(misclustering_error(r.partition, truth_of(d, 2)) == 0.0);
  }
  SUBCASE("single cluster") {
    const Dataset d = hetero(30, 4.0, 1);
    const auto r = oracle_lasdp(d, {MatrixXd::Identity(4, 4)}, {});
    CHECK(r.partition.k() == 1);
    CHECK(r.partition.sizes()[0] == 30);
  }
}

TEST_CASE("iLA-SDP from the true partition") {
  const Dataset d = hetero(60, 10.0, 2);
  const auto r = ilasdp(d, truth_of(d, 3), {});
  CHECK(r.trace.iterations <= 3);
  CHECK(r.trace.converged);
  CHECK(misclustering_error(r.partition, truth_of(d, 3)) == 0.0);
  CHECK(r.trace.monotone);
}

TEST_CASE("iLA-SDP with eps = infinity is one oracle solve") {
  const Dataset d = hetero(45, 4.0, 3);
  const Partition init = hierarchical(d.x(), 3);
  IlasdpConfig cfg;
  cfg.eps = std::numeric_limits<double>::infinity();
  const auto it = ilasdp(d, init, cfg);
  const auto oracle = oracle_lasdp(d, init_cov_from_partition(d, init), cfg);
  CHECK(it.trace.iterations == 1);
  CHECK(it.partition == oracle.partition);
  CHECK((it.z.sum() - oracle.z.sum()).norm() == 0.0);
}

TEST_CASE("iLA-SDP relaxed objective is monotone") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const Dataset d = hetero(45, 3.0, 10 + seed);
    IlasdpConfig cfg;
    cfg.record_loglik = true;
    // Overlapping clusters; inexact solves must still give a monotone sequence.
    cfg.admm.max_iters = 1500;
    const auto r = ilasdp(d, hierarchical(d.x(), 3), cfg);
    CHECK(r.trace.monotone);
    for (std::size_t s = 1; s < r.trace.objective.size(); ++s) {
      const double prev = r.trace.objective[s - 1];
      CHECK(r.trace.objective[s] >= prev - 1e-6 * (1.0 + std::abs(prev)));
    }
    CHECK(r.trace.loglik.size() == r.trace.objective.size());
  }
}

TEST_CASE("iLA-SDP is deterministic and solver choice follows n") {
  const Dataset d = hetero(45, 3.0, 7);
  IlasdpConfig cfg;
  cfg.seed = 99;
  const auto a = ilasdp(d, hierarchical(d.x(), 3), cfg);
  const auto b = ilasdp(d, hierarchical(d.x(), 3), cfg);
  CHECK(a.partition == b.partition);
  CHECK(a.trace.objective == b.trace.objective);
  CHECK(resolve_solver(cfg, 300) == SolverKind::kAdmm);
  CHECK(resolve_solver(cfg, 301) == SolverKind::kBm);
  cfg.solver = SolverKind::kAdmm;
  CHECK(resolve_solver(cfg, 1000) == SolverKind::kAdmm);
}

TEST_CASE("iLA-SDP with the BM solver") {
  const Dataset d = hetero(60, 8.0, 5);
  IlasdpConfig cfg;
  cfg.solver = SolverKind::kBm;
  const auto r = ilasdp(d, hierarchical(d.x(), 3), cfg);
  CHECK(r.trace.monotone);
  CHECK(misclustering_error(r.partition, truth_of(d, 3)) <= 0.05);
}

TEST_CASE("iLA-SDP input validation") {
  const Dataset d = hetero(30, 4.0, 1);
  IlasdpConfig cfg;
  cfg.max_outer = 0;
  CHECK_THROWS_AS(ilasdp(d, truth_of(d, 3), cfg), ValidationError);
  cfg = {};
  cfg.eps = 0.0;
  CHECK_THROWS_AS(ilasdp(d, truth_of(d, 3), cfg), ValidationError);
  CHECK_THROWS_AS(ilasdp(d, Partition(std::vector<int>(30, 0), 3), IlasdpConfig{}), DegeneratePartition);
  CHECK_THROWS_AS(ilasdp(d, Partition({0, 1}, 2), IlasdpConfig{}), DimensionMismatch);
}

TEST_CASE("trace CSV") {
  IlasdpTrace t;
  t.objective = {-3.0, -2.5};
  t.r = {std::numeric_limits<double>::quiet_NaN(), 0.25};
  t.loglik = {std::numeric_limits<double>::quiet_NaN(), -2.0};
  std::ostringstream out;
  write_trace_csv(out, t);
  CHECK(out.str() == "iteration,objective,r,loglik\n1,-3,,\n2,-2.5,0.25,-2\n");
}

TEST_CASE("block objective is maximized at scatter / mass") {
  std::mt19937_64 rng(3);
  const MatrixXd s = oracle::random_spd(3, rng);
  const double mass = 4.0;
  const double top = block_objective(s, mass, s / mass);
  for (int rep = 0; rep < 20; ++rep) {
    CHECK(block_objective(s, mass, oracle::random_spd(3, rng)) <= top);
  }
}
