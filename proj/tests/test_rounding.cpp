#include "doctest.h"

#include "lasdp/error.hpp"
#include "lasdp/rounding.hpp"
#include "oracles.hpp"

#include <random>

using namespace lasdp;

TEST_CASE("spectral rounding of an exact lift") {
  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 10; ++rep) {
    const int k = 2 + rep % 4;
    std::vector<int> labels(30);
    for (int i = 0; i < 30; ++i) {
      labels[static_cast<std::size_t>(i)] = i % k;
    }
    std::shuffle(labels.begin(), labels.end(), rng);
    const Partition p(labels, k);
    CHECK(oracle::same_partition(spectral_round(lift(p).sum(), k, 3), p));
  }
}

TEST_CASE("spectral rounding of the identity with K = n") {
  const Partition p = spectral_round(MatrixXd::Identity(6, 6), 6, 0);
  CHECK_FALSE(p.has_empty_cluster());
}

TEST_CASE("spectral rounding tolerates small symmetric noise") {
  std::mt19937_64 rng(2);
  std::vector<int> labels(30);
  for (int i = 0; i < 30; ++i) {
    labels[static_cast<std::size_t>(i)] = i % 3;
  }
  std::shuffle(labels.begin(), labels.end(), rng);
  const Partition p(labels, 3);
  const MatrixXd noisy = lift(p).sum() + 0.01 * oracle::random_symmetric(30, rng);
  CHECK(oracle::same_partition(spectral_round(noisy, 3, 5), p));
}

TEST_CASE("block-mass rounding") {
  const Partition p({1, 0, 2, 2, 0, 1}, 3);
  CHECK(blockmass_round(lift(p)) == p);

  const MatrixXd uniform = MatrixXd::Constant(4, 4, 1.0 / 8.0);
  const Partition tie = blockmass_round(LiftedMembership({uniform, uniform}));
  CHECK(tie.labels() == std::vector<int>{0, 0, 0, 0});
}

TEST_CASE("block-mass rounding is equivariant under block relabeling") {
  std::mt19937_64 rng(4);
  const auto z = oracle::random_feasible(9, 3, 3, rng);
  const Partition base = blockmass_round(z);
  const LiftedMembership rotated({z.block(2), z.block(0), z.block(1)});
  const Partition moved = blockmass_round(rotated);
  for (Index i = 0; i < 9; ++i) {
    CHECK(moved[i] == (base[i] + 1) % 3);
  }
}

TEST_CASE("rounding dispatch and names") {
  const Partition p({0, 0, 1, 1}, 2);
  CHECK(oracle::same_partition(round_membership(lift(p), Rounding::kSpectral, 0), p));
  CHECK(round_membership(lift(p), Rounding::kBlockmass, 0) == p);
  CHECK(rounding_from_string(to_string(Rounding::kBlockmass)) == Rounding::kBlockmass);
  CHECK_THROWS_AS(rounding_from_string("nearest"), ValidationError);
  CHECK_THROWS_AS(spectral_round(MatrixXd::Identity(3, 3), 4, 0), ValidationError);
}
