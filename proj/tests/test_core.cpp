#include "doctest.h"

#include "lasdp/core.hpp"
#include "lasdp/error.hpp"
#include "oracles.hpp"

#include <random>

using namespace lasdp;

TEST_CASE("lift of singleton clusters") {
  const auto z = lift(Partition({0, 1}, 2));
  CHECK(z.block(0).isApprox((MatrixXd(2, 2) << 1, 0, 0, 0).finished()));
  CHECK(z.block(1).isApprox((MatrixXd(2, 2) << 0, 0, 0, 1).finished()));
}

TEST_CASE("lift of two pairs") {
  const auto z = lift(Partition({0, 0, 1, 1}, 2));
  CHECK(z.block(0).topLeftCorner(2, 2).isApprox(MatrixXd::Constant(2, 2, 0.5)));
  CHECK(z.block(0).bottomRightCorner(2, 2).isZero());
  CHECK(z.block(1).bottomRightCorner(2, 2).isApprox(MatrixXd::Constant(2, 2, 0.5)));
  CHECK(z.block(0).trace() + z.block(1).trace() == doctest::Approx(2.0));
}

TEST_CASE("sum of lifted blocks equals H B H^T") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<int> labels(12);
    for (int i = 0; i < 12; ++i) {
      labels[static_cast<std::size_t>(i)] = i % 3;
    }
    std::shuffle(labels.begin(), labels.end(), rng);
    const Partition p(labels, 3);
    const MatrixXd h = assignment_matrix(p);
    const VectorXd inv_sizes = (h.colwise().sum().array().inverse()).transpose();
    const MatrixXd hbh = h * inv_sizes.asDiagonal() * h.transpose();
    CHECK((lift(p).sum() - hbh).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(partition_from_assignment(h) == p);
  }
}

TEST_CASE("lift rejects an empty cluster") {
  CHECK_THROWS_AS(lift(Partition({0, 0, 0}, 2)), DegeneratePartition);
}

TEST_CASE("lifted blocks are rank one with indicator row sums") {
  const Partition p({0, 1, 1, 2, 0, 1}, 3);
  const auto z = lift(p);
  for (int k = 0; k < 3; ++k) {
    const VectorXd rows = z.block(k).rowwise().sum();
    for (Index i = 0; i < p.n(); ++i) {
      CHECK(rows(i) == doctest::Approx(p[i] == k ? 1.0 : 0.0));
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(z.block(k));
    CHECK(es.eigenvalues()(p.n() - 2) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(es.eigenvalues()(p.n() - 1) == doctest::Approx(1.0));
  }
}

TEST_CASE("key identity") {
  const Partition p({0, 1, 0, 2, 2, 1, 0}, 3);
  const Index n = p.n();
  SUBCASE("zero similarity") {
    const auto [l, r] = key_identity_check(std::vector<MatrixXd>(3, MatrixXd::Zero(n, n)), p);
    CHECK(l == 0.0);
    CHECK(r == 0.0);
  }
  SUBCASE("identity similarity gives K") {
    const auto [l, r] = key_identity_check(std::vector<MatrixXd>(3, MatrixXd::Identity(n, n)), p);
    CHECK(l == doctest::Approx(3.0));
    CHECK(r == doctest::Approx(3.0));
  }
  SUBCASE("random similarity against a double loop") {
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<MatrixXd> a;
      for (int k = 0; k < 3; ++k) {
        a.push_back(oracle::random_symmetric(n, rng));
      }
      const auto [l, r] = key_identity_check(a, p);
      const double direct = oracle::partition_objective(a, p);
      CHECK(std::abs(l - r) <= 1e-10);
      CHECK(std::abs(l - direct) <= 1e-10);
    }
  }
  CHECK_THROWS_AS(key_identity_check(std::vector<MatrixXd>(2, MatrixXd::Zero(n, n)), p),
                  DimensionMismatch);
}

TEST_CASE("feasibility residuals") {
  const auto z = lift(Partition({0, 0, 1, 1, 1}, 2));
  const auto r = feasibility_residuals(z);
  CHECK(r.worst() <= 1e-12);
  CHECK(r.within(0.0 + 1e-12));

  std::vector<MatrixXd> blocks = z.blocks();
  blocks[0](0, 1) = blocks[0](1, 0) = -0.01;
  const auto bad = feasibility_residuals(LiftedMembership(blocks));
  CHECK(bad.min_entry == doctest::Approx(-0.01));
}

TEST_CASE("partition helpers") {
  const Partition p({2, 2, 0, 1}, 3);
  CHECK(p.sizes() == std::vector<Index>{1, 1, 2});
  CHECK(p.one_based() == std::vector<int>{3, 3, 1, 2});
  CHECK(Partition::from_one_based({3, 3, 1, 2}, 3) == p);
  CHECK(p.canonical().labels() == std::vector<int>{0, 0, 1, 2});
  CHECK_FALSE(p.has_empty_cluster());
  CHECK(Partition({0, 0}, 2).has_empty_cluster());
  CHECK_THROWS_AS(Partition({0, 3}, 2), ValidationError);
}

TEST_CASE("dataset validation and subsets") {
  MatrixXd x(2, 3);
  x << 1, 2, 3, 4, 5, 6;
  const Dataset d(x, std::vector<int>{0, 1, 1});
  const Dataset s = d.subset({2, 0});
  CHECK(s.x().col(0) == x.col(2));
  CHECK(s.true_labels()->at(0) == 1);
  CHECK(d.select_features({1}).x().row(0) == x.row(1));
  x(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(Dataset{x}, ValidationError);
  CHECK_THROWS_AS(Dataset(MatrixXd::Zero(2, 3), std::vector<int>{0}), DimensionMismatch);
}
