#include "doctest.h"

#include "lasdp/enhance.hpp"
#include "lasdp/error.hpp"
#include "lasdp/generators.hpp"
#include "lasdp/metrics.hpp"
#include "oracles.hpp"

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/special_functions/beta.hpp>

#include <random>

using namespace lasdp;

TEST_CASE("incomplete beta against boost") {
  for (double a : {0.5, 1.0, 2.5, 10.0, 60.0}) {
    for (double b : {0.5, 1.0, 3.0, 25.0, 400.0}) {
      for (double x : {0.0, 1e-6, 0.05, 0.3, 0.5, 0.77, 0.999, 1.0}) {
        const double want = boost::math::ibeta(a, b, x);
        CHECK(incomplete_beta(a, b, x) == doctest::Approx(want).epsilon(1e-10).scale(1e-300));
      }
    }
  }
  CHECK_THROWS_AS(incomplete_beta(1.0, 1.0, 1.5), ValidationError);
}

TEST_CASE("F-test p-values against boost") {
  for (double d1 : {1.0, 2.0, 5.0}) {
    for (double d2 : {3.0, 20.0, 997.0}) {
      boost::math::fisher_f dist(d1, d2);
      for (double f : {0.0, 0.1, 1.0, 3.7, 25.0}) {
        const double want = boost::math::cdf(boost::math::complement(dist, f));
        CHECK(f_test_pvalue(f, d1, d2) == doctest::Approx(want).epsilon(1e-9));
      }
    }
  }
  CHECK(f_test_pvalue(std::numeric_limits<double>::infinity(), 2.0, 5.0) == 0.0);
}

TEST_CASE("ANOVA edge cases") {
  MatrixXd x(3, 4);
  x << 5, 5, 5, 5,   // constant
      0, 0, 1, 1,    // no within-group variance
      0, 1, 0, 1;    // no between-group variance
  const Partition g({0, 0, 1, 1}, 2);
  const auto r = anova_f(x, g);
  CHECK(r.constant[0]);
  CHECK(r.p_values(0) == 1.0);
  CHECK(r.zero_within[1]);
  CHECK(std::isinf(r.f(1)));
  CHECK(r.p_values(1) == 0.0);
  CHECK(r.f(2) == doctest::Approx(0.0));
  CHECK(r.p_values(2) == doctest::Approx(1.0));
}

TEST_CASE("F-test screening keeps the informative attributes") {
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    const Index n = 90;
    MatrixXd x(12, n);
    std::vector<int> labels(n);
    for (Index i = 0; i < n; ++i) {
      const int k = static_cast<int>(i % 3);
      labels[static_cast<std::size_t>(i)] = k;
      for (Index a = 0; a < 12; ++a) {
        x(a, i) = z(rng) + (a < 3 && a == k ? 4.0 : 0.0);
      }
    }
    const auto r = ftest_screen(Dataset(x, labels), Partition(labels, 3), 3, 0.0, 1e10, seed);
    hits += r.selected == std::vector<Index>{0, 1, 2};
  }
  CHECK(hits >= 19);
}

TEST_CASE("screening cutoff behaviour") {
  MatrixXd x(4, 6);
  x << 0, 1, 0, 10, 11, 10,
      0, 1, 2, 0, 1, 2,
      1, 0, 1, 0, 1, 0,
      2, 0, 1, 1, 0, 2;
  const Dataset d(x);
  const Partition g({0, 0, 0, 1, 1, 1}, 2);
  const auto clear = ftest_screen(d, g, 1, 1.0, 10.0, 3);
  CHECK(clear.clear_cutoff);
  CHECK(clear.selected == std::vector<Index>{0});

  // Without a clear cutoff alpha = 1 keeps everything and alpha = 0 keeps p0.
  const auto all = ftest_screen(d, g, 2, 1.0, 1e300, 3);
  CHECK_FALSE(all.clear_cutoff);
  CHECK(all.selected.size() == 4);
  CHECK(ftest_screen(d, g, 2, 0.0, 1e300, 3).selected.size() == 2);
  CHECK_THROWS_AS(ftest_screen(d, g, 5, 0.5, 1e10, 3), ValidationError);
}

TEST_CASE("LDA directions") {
  const Dataset d = generate({.family = Family::kRandomCov, .n = 150, .p = 6, .k = 3, .lambda = 4.0,
                              .beta = 3.0, .seed = 5, .cov_seed = 2});
  const Partition truth(*d.true_labels(), 3);
  MatrixXd within;
  const MatrixXd dirs = lda_directions(d.x(), truth, 2, &within);
  CHECK(dirs.rows() == 6);
  CHECK(dirs.cols() == 2);
  CHECK((dirs.transpose() * within * dirs - MatrixXd::Identity(2, 2)).norm() < 1e-8);

  // K - 1 directions carry the full Mahalanobis geometry of the cluster means.
  const MatrixXd means = cluster_means(d.x(), truth);
  const Eigen::LLT<MatrixXd> llt(within);
  for (int k = 0; k < 3; ++k) {
    for (int l = k + 1; l < 3; ++l) {
      const VectorXd diff = means.col(k) - means.col(l);
      const double full = std::sqrt(diff.dot(llt.solve(diff)));
      const double reduced = (dirs.transpose() * diff).norm();
      CHECK(reduced == doctest::Approx(full).epsilon(0.05));
    }
  }
}

TEST_CASE("LDA reduction") {
  const Dataset d = generate({.family = Family::kHeteroSimplex, .n = 120, .p = 8, .k = 3, .lambda = 8.0,
                              .cond = 4.0, .seed = 6});
  const auto r = lda_reduce(d, 3, 5, 3);
  CHECK(r.k_tilde >= 3);
  CHECK(r.k_tilde <= 5);
  CHECK(r.snr.size() == 3);
  CHECK(r.transformed.rows() == r.k_tilde - 1);
  CHECK(r.transformed.cols() == 120);
  CHECK(misclustering_error(hierarchical(r.transformed, 3), Partition(*d.true_labels(), 3)) <= 0.05);
  CHECK_THROWS_AS(lda_reduce(d, 4, 3, 3), ValidationError);
}

TEST_CASE("sketch-and-lift") {
  const Dataset d = generate({.family = Family::kHeteroSimplex, .n = 60, .p = 3, .k = 3, .lambda = 8.0,
                              .cond = 5.0, .seed = 7});
  IlasdpConfig cfg;
  SUBCASE("gamma = 1 is the full run") {
    const auto s = sketch_and_lift(d, 3, 1.0, cfg, 4);
    const auto full = ilasdp(d, hierarchical(d.x(), 3), cfg);
    CHECK(s.partition == full.partition);
    CHECK(s.sketch.size() == 60);
    CHECK(s.attempts == 1);
  }
  SUBCASE("subsample labels every point") {
    const Dataset big = generate({.family = Family::kHeteroSimplex, .n = 240, .p = 3, .k = 3,
                                  .lambda = 10.0, .cond = 5.0, .seed = 8});
    const auto s = sketch_and_lift(big, 3, 0.4, cfg, 4);
    CHECK(s.partition.n() == 240);
    CHECK(s.sketch.size() < 240);
    CHECK(misclustering_error(s.partition, Partition(*big.true_labels(), 3)) <= 0.05);
  }
  CHECK_THROWS_AS(sketch_and_lift(d, 3, 0.0, cfg, 0), ValidationError);
  CHECK_THROWS_AS(sketch_and_lift(d, 3, 0.01, cfg, 0), DegeneratePartition);
}
