#include "doctest.h"

#include "lasdp/error.hpp"
#include "lasdp/likelihood.hpp"
#include "lasdp/rounding.hpp"
#include "lasdp/sdp.hpp"
#include "oracles.hpp"

#include <random>

using namespace lasdp;

namespace {

Dataset two_far_groups() {
  MatrixXd x(1, 6);
  x << -10, -10.2, -9.9, 10, 10.1, 9.8;
  return Dataset(x, std::vector<int>{0, 0, 0, 1, 1, 1});
}

SdpProblem identity_cov_problem(const Dataset& d, int k) {
  const MatrixXd eye = MatrixXd::Identity(d.p(), d.p());
  SdpProblem pr = SdpProblem::lasdp(std::vector<MatrixXd>(static_cast<std::size_t>(k),
                                                          similarity_matrix(d, eye, 0).a));
  for (int b = 0; b < k; ++b) {
    pr.factors.push_back(similarity_factors(d, eye));
  }
  return pr;
}

}  // namespace

TEST_CASE("ADMM: identity costs") {
  const auto sol = solve_lasdp_admm(SdpProblem::lasdp({MatrixXd::Identity(2, 2), MatrixXd::Identity(2, 2)}));
  CHECK(sol.objective == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(feasibility_residuals(sol.z).within(1e-4));
}

TEST_CASE("ADMM: two separated groups recover the planted lift") {
  const Dataset d = two_far_groups();
  const auto sol = solve_lasdp_admm(identity_cov_problem(d, 2));
  CHECK(sol.report.termination == Termination::kConverged);
  const MatrixXd truth = lift(Partition(*d.true_labels(), 2)).sum();
  CHECK((sol.z.sum() - truth).norm() <= 1e-2);
  CHECK(feasibility_residuals(sol.z).within(1e-4));
}

TEST_CASE("ADMM: zero costs still give a feasible point") {
  const auto sol = solve_lasdp_admm(SdpProblem::lasdp(std::vector<MatrixXd>(3, MatrixXd::Zero(7, 7))));
  CHECK(feasibility_residuals(sol.z).within(1e-4));
}

TEST_CASE("ADMM: deterministic") {
  const Dataset d = generate({.family = Family::kHeteroSimplex, .n = 30, .p = 3, .k = 3, .lambda = 4.0, .cond = 5.0, .seed = 4});
  const auto pr = identity_cov_problem(d, 3);
  const auto a = solve_lasdp_admm(pr);
  const auto b = solve_lasdp_admm(pr);
  CHECK(a.report.iterations == b.report.iterations);
  CHECK(a.objective == b.objective);
  CHECK(spectral_round(a.z.sum(), 3, 1) == spectral_round(b.z.sum(), 3, 1));
}

TEST_CASE("affine projection") {
  std::mt19937_64 rng(3);
  std::vector<MatrixXd> x{oracle::random_symmetric(6, rng), oracle::random_symmetric(6, rng)};
  std::vector<MatrixXd> px = x;
  project_affine(px, 2.0);
  MatrixXd sum = px[0] + px[1];
  CHECK(sum.trace() == doctest::Approx(2.0));
  CHECK((sum.rowwise().sum() - VectorXd::Ones(6)).cwiseAbs().maxCoeff() < 1e-12);
  // Orthogonality against another point of the affine set.
  std::vector<MatrixXd> y{oracle::random_symmetric(6, rng), oracle::random_symmetric(6, rng)};
  project_affine(y, 2.0);
  double dot = 0.0;
  for (int b = 0; b < 2; ++b) {
    dot += frobenius_dot(x[static_cast<std::size_t>(b)] - px[static_cast<std::size_t>(b)],
                         y[static_cast<std::size_t>(b)] - px[static_cast<std::size_t>(b)]);
  }
  CHECK(std::abs(dot) < 1e-10);
  std::vector<MatrixXd> again = px;
  project_affine(again, 2.0);
  CHECK((again[0] - px[0]).norm() < 1e-12);
}

TEST_CASE("relaxation dominates every partition on tiny instances") {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 6; ++rep) {
    const int n = 6 + rep % 2;
    const int k = 2 + rep % 2;
    std::vector<MatrixXd> a;
    for (int b = 0; b < k; ++b) {
      a.push_back(oracle::random_symmetric(n, rng));
    }
    const auto sol = solve_lasdp_admm(SdpProblem::lasdp(a));
    double best = -std::numeric_limits<double>::infinity();
    oracle::for_each_partition(n, k, [&](const Partition& p) {
      best = std::max(best, oracle::partition_objective(a, p));
    });
    CHECK(sol.objective >= best - 1e-3 * (1.0 + std::abs(best)));
  }
}

TEST_CASE("BM: agrees with ADMM on the separated instance") {
  const Dataset d = two_far_groups();
  const auto pr = identity_cov_problem(d, 2);
  const Partition admm = spectral_round(solve_lasdp_admm(pr).z.sum(), 2, 0);
  int agree = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto bm = solve_lasdp_bm(pr, 2, seed);
    agree += oracle::same_partition(spectral_round(bm.z.sum(), 2, 0), admm);
    CHECK(bm.factor->u.squaredNorm() == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(bm.factor->u.minCoeff() >= 0.0);
    CHECK(feasibility_residuals(bm.z).within(1e-3));
  }
  CHECK(agree >= 8);
}

TEST_CASE("BM: rank one on an exactly recoverable instance") {
  const Dataset d = two_far_groups();
  const auto sol = solve_lasdp_bm(identity_cov_problem(d, 2), 1, 5);
  const auto truth = lift(Partition(*d.true_labels(), 2));
  CHECK(sol.factor->block_width == 1);
  // Blocks may come out in either order.
  const double direct = (sol.z.block(0) - truth.block(0)).norm() + (sol.z.block(1) - truth.block(1)).norm();
  const double swapped = (sol.z.block(0) - truth.block(1)).norm() + (sol.z.block(1) - truth.block(0)).norm();
  CHECK(std::min(direct, swapped) <= 1e-2);
}

TEST_CASE("BM: deterministic for a fixed seed") {
  const Dataset d = generate({.family = Family::kHeteroSimplex, .n = 40, .p = 3, .k = 3, .lambda = 4.0, .cond = 5.0, .seed = 9});
  const auto pr = identity_cov_problem(d, 3);
  const auto a = solve_lasdp_bm(pr, 2, 77);
  const auto b = solve_lasdp_bm(pr, 2, 77);
  CHECK(a.report.iterations == b.report.iterations);
  CHECK(a.report.inner_iterations == b.report.inner_iterations);
  CHECK(a.factor->u == b.factor->u);
}

TEST_CASE("K-means SDP") {
  SUBCASE("diagonal dominant costs with K = n give the identity") {
    MatrixXd a = MatrixXd::Constant(4, 4, -1.0);
    a.diagonal().setConstant(5.0);
    const auto sol = solve_kmeans_sdp(a, 4);
    CHECK((sol.z - MatrixXd::Identity(4, 4)).norm() < 1e-3);
  }
  SUBCASE("Gram matrix of two separated groups") {
    const Dataset d = two_far_groups();
    const MatrixXd centered = d.x().colwise() - d.x().rowwise().mean();
    const auto sol = solve_kmeans_sdp(centered.transpose() * centered, 2);
    CHECK((sol.z - lift(Partition(*d.true_labels(), 2)).sum()).norm() <= 1e-2);
  }
  SUBCASE("single-block problem equals the K-block problem with identical costs") {
    const Dataset d = generate({.family = Family::kCommonCond, .n = 24, .p = 3, .k = 3, .lambda = 5.0, .cond = 0.0, .seed = 2});
    const MatrixXd a = similarity_matrix(d, MatrixXd::Identity(3, 3), 0).a;
    const auto single = solve_kmeans_sdp(a, 3);
    const auto blocks = solve_lasdp_admm(SdpProblem::lasdp({a, a, a}));
    CHECK(std::abs(single.objective - blocks.objective) <= 1e-3 * std::abs(single.objective));
    CHECK((single.z - blocks.z.sum()).norm() <= 1e-2 * single.z.norm());
  }
}

TEST_CASE("problem validation") {
  CHECK_THROWS_AS(solve_lasdp_admm(SdpProblem::lasdp({MatrixXd::Zero(3, 3), MatrixXd::Zero(4, 4)})),
                  DimensionMismatch);
  MatrixXd asym = MatrixXd::Zero(3, 3);
  asym(0, 1) = 1.0;
  CHECK_THROWS_AS(solve_lasdp_admm(SdpProblem::lasdp({asym})), ValidationError);
  CHECK_THROWS_AS(solver_from_string("ipm"), ValidationError);
}
