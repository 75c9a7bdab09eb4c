#include "doctest.h"

#include "lasdp/baselines.hpp"
#include "lasdp/error.hpp"
#include "lasdp/generators.hpp"
#include "lasdp/metrics.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <random>

using namespace lasdp;

namespace {

MatrixXd row(std::initializer_list<double> v) {
  MatrixXd x(1, static_cast<Index>(v.size()));
  Index i = 0;
  for (double e : v) {
    x(0, i++) = e;
  }
  return x;
}

}  // namespace

TEST_CASE("kmeans on small examples") {
  const auto r = kmeans(row({0, 0.1, 10, 10.1}), 2, 0);
  CHECK(r.partition.canonical().labels() == std::vector<int>{0, 0, 1, 1});
  CHECK(r.inertia == doctest::Approx(0.01));

  const auto one = kmeans(row({1, 2, 3, 6}), 1, 0);
  CHECK(one.centers(0, 0) == doctest::Approx(3.0));
  CHECK(one.inertia == doctest::Approx(4 + 1 + 0 + 9));

  const auto each = kmeans(row({1, 5, 9}), 3, 0);
  CHECK(each.inertia == doctest::Approx(0.0));
  CHECK_FALSE(each.partition.has_empty_cluster());
  CHECK_THROWS_AS(kmeans(row({1, 2}), 3, 0), ValidationError);
}

TEST_CASE("kmeans recovers separated blobs and is deterministic") {
  const Dataset d = oracle::separated_blobs(20, 4, 3, 15.0, 8);
  const auto a = kmeans(d.x(), 4, 3);
  const auto b = kmeans(d.x(), 4, 3);
  CHECK(misclustering_error(a.partition, Partition(*d.true_labels(), 4)) == 0.0);
  CHECK(a.partition == b.partition);
  CHECK(a.inertia == b.inertia);
}

TEST_CASE("Lloyd inertia never increases") {
  const Dataset d = generate({.family = Family::kHeteroSimplex, .n = 150, .p = 4, .k = 3,
                              .lambda = 2.0, .cond = 10.0, .seed = 1});
  std::vector<double> trace;
  lloyd(d.x(), d.x().leftCols(3), 100, &trace);
  REQUIRE(trace.size() >= 2);
  for (std::size_t i = 1; i < trace.size(); ++i) {
    CHECK(trace[i] <= trace[i - 1] + 1e-9 * trace[i - 1]);
  }
}

TEST_CASE("EM") {
  SUBCASE("single component gives the sample moments") {
    const Dataset d = generate({.family = Family::kHeteroSimplex, .n = 200, .p = 3, .k = 1,
                                .lambda = 1.0, .cond = 4.0, .seed = 2});
    const auto r = em_gmm(d, 1, Partition(std::vector<int>(200, 0), 1));
    const VectorXd mean = d.x().rowwise().mean();
    const MatrixXd c = d.x().colwise() - mean;
    CHECK((r.params.means[0] - mean).norm() < 1e-10);
    CHECK((r.params.covariances[0] - c * c.transpose() / 200.0).norm() < 1e-8);
    CHECK(r.iterations <= 2);
  }
  SUBCASE("log-likelihood is monotone and the truth is nearly a fixed point") {
    const Dataset d = generate({.family = Family::kHeteroSimplex, .n = 150, .p = 3, .k = 3,
                                .lambda = 8.0, .cond = 5.0, .seed = 3});
    const Partition truth(*d.true_labels(), 3);
    const auto r = em_gmm(d, 3, truth);
    for (std::size_t i = 1; i < r.loglik_trace.size(); ++i) {
      CHECK(r.loglik_trace[i] >= r.loglik_trace[i - 1] - 1e-8 * std::abs(r.loglik_trace[i - 1]));
    }
    CHECK(r.converged);
    CHECK(misclustering_error(r.partition, truth) == 0.0);
    CHECK(r.params.weights.sum() == doctest::Approx(1.0));
  }
}

TEST_CASE("mean-only EM") {
  SUBCASE("single component converges to the sample mean") {
    const Dataset d(row({1, 2, 3, 6}));
    const auto r = mem(d, 1, 0);
    CHECK(r.params.means[0](0) == doctest::Approx(3.0));
  }
  SUBCASE("two symmetric unit-variance groups") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> z;
    MatrixXd x(1, 400);
    std::vector<int> labels(400);
    for (Index i = 0; i < 400; ++i) {
      labels[static_cast<std::size_t>(i)] = i < 200 ? 0 : 1;
      x(0, i) = (i < 200 ? -4.0 : 4.0) + z(rng);
    }
    const auto r = mem(Dataset(x, labels), 2, 1);
    std::vector<double> m{r.params.means[0](0), r.params.means[1](0)};
    std::sort(m.begin(), m.end());
    CHECK(m[0] == doctest::Approx(-4.0).epsilon(0.05));
    CHECK(m[1] == doctest::Approx(4.0).epsilon(0.05));
    CHECK(misclustering_error(r.partition, Partition(labels, 2)) < 0.01);
  }
}

TEST_CASE("hierarchical clustering") {
  CHECK(hierarchical(row({0, 1, 10, 11}), 2).labels() == std::vector<int>{0, 0, 1, 1});
  for (Linkage l : {Linkage::kSingle, Linkage::kComplete, Linkage::kAverage}) {
    CHECK(hierarchical(row({0, 1, 10, 11, 30}), 3, l).labels() == std::vector<int>{0, 0, 1, 1, 2});
  }
  CHECK(hierarchical(row({3, 1, 2}), 3).labels() == std::vector<int>{0, 1, 2});
  CHECK(hierarchical(row({3, 1, 2}), 1).labels() == std::vector<int>{0, 0, 0});
  CHECK(linkage_from_string("average") == Linkage::kAverage);
  CHECK_THROWS_AS(linkage_from_string("centroid"), ValidationError);
}

TEST_CASE("Ward heights match a naive greedy implementation") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> z;
  for (int rep = 0; rep < 5; ++rep) {
    MatrixXd x(2, 15);
    for (Index i = 0; i < x.size(); ++i) {
      x(i) = z(rng);
    }
    const auto merges = agglomerate(x);
    std::vector<double> naive = oracle::naive_ward_costs(x);
    std::sort(naive.begin(), naive.end());
    REQUIRE(merges.size() == naive.size());
    for (std::size_t i = 0; i < naive.size(); ++i) {
      CHECK(merges[i].height == doctest::Approx(2.0 * naive[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("spectral clustering") {
  const Dataset d = oracle::separated_blobs(15, 3, 2, 12.0, 6);
  const Partition truth(*d.true_labels(), 3);
  const Partition a = spectral_clustering(d.x(), 3, 1);
  CHECK(misclustering_error(a, truth) == 0.0);
  // The median bandwidth makes the method invariant to a global rescaling.
  CHECK(spectral_clustering(d.x() * 7.5, 3, 1) == a);
}

TEST_CASE("label perturbation keeps the expected fraction") {
  const int k = 4;
  const double alpha = 0.4;
  std::vector<int> labels(10000);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    labels[i] = static_cast<int>(i % k);
  }
  const Partition p(labels, k);
  const Partition q = perturb_labels(p, alpha, 11);
  double same = 0.0;
  for (Index i = 0; i < p.n(); ++i) {
    same += p[i] == q[i];
  }
  CHECK(std::abs(same / 10000.0 - (1.0 - alpha * (1.0 - 1.0 / k))) < 0.02);
  CHECK(perturb_labels(p, 0.0, 11) == p);
  CHECK_THROWS_AS(perturb_labels(p, 1.5, 0), ValidationError);
}

TEST_CASE("merge_to_k, random_partition and cluster means") {
  const MatrixXd x = row({0, 0.5, 10, 10.5, 20});
  const Partition merged = merge_to_k(x, Partition({0, 1, 2, 3, 4}, 5), 3);
  CHECK(merged.canonical().labels() == std::vector<int>{0, 0, 1, 1, 2});

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Partition r = random_partition(7, 7, seed);
    CHECK_FALSE(r.has_empty_cluster());
  }
  CHECK(random_partition(50, 3, 1) == random_partition(50, 3, 1));

  const MatrixXd m = cluster_means(x, Partition({0, 0, 1, 1, 1}, 3));
  CHECK(m(0, 0) == doctest::Approx(0.25));
  CHECK(m(0, 1) == doctest::Approx(13.5));
  CHECK(m(0, 2) == 0.0);
  CHECK(argmax_rows((MatrixXd(2, 2) << 1, 1, 0, 2).finished()) == std::vector<int>{0, 1});
}
