#include "doctest.h"

#include "lasdp/benchmark.hpp"
#include "lasdp/error.hpp"

#include <sstream>

using namespace lasdp;

namespace {

BenchmarkConfig small_config() {
  BenchmarkConfig cfg;
  cfg.methods = {Method::kKmeans, Method::kHc};
  cfg.base = {.family = Family::kHeteroSimplex, .n = 30, .p = 3, .k = 3, .lambda = 8.0, .cond = 5.0};
  cfg.grid = {{"lambda", {2.0, 8.0}}, {"n", {30, 45}}};
  cfg.replicates = 2;
  cfg.master_seed = 5;
  return cfg;
}

}  // namespace

TEST_CASE("grid enumeration puts the last axis fastest") {
  const auto cfg = small_config();
  CHECK(cfg.grid_size() == 4);
  CHECK(grid_point(cfg, 0) == std::vector<double>{2.0, 30.0});
  CHECK(grid_point(cfg, 1) == std::vector<double>{2.0, 45.0});
  CHECK(grid_point(cfg, 2) == std::vector<double>{8.0, 30.0});
}

TEST_CASE("one row per method, grid point and replicate") {
  auto cfg = small_config();
  const auto rows = run_benchmark(cfg);
  REQUIRE(rows.size() == 16);
  CHECK(rows[0].method == "hc");
  CHECK(rows[0].grid_index == 0);
  CHECK(rows[1].replicate == 1);
  for (const auto& r : rows) {
    CHECK(r.reason.empty());
    CHECK(r.error >= 0.0);
    CHECK(r.error <= 1.0);
  }
  // Both methods see the same data seed.
  CHECK(rows[0].seed == rows[8].seed);
  CHECK(rows[0].seed != rows[1].seed);
}

TEST_CASE("results do not depend on the job count") {
  auto cfg = small_config();
  std::ostringstream a;
  std::ostringstream b;
  write_results_csv(a, cfg, run_benchmark(cfg), false);
  cfg.jobs = 3;
  write_results_csv(b, cfg, run_benchmark(cfg), false);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("method,grid,lambda,n,replicate,seed,error,iterations,reason\n", 0) == 0);
}

TEST_CASE("failures become rows with a reason") {
  auto cfg = small_config();
  cfg.methods = {Method::kIlasdp};
  cfg.grid = {};
  cfg.replicates = 1;
  cfg.options.init = InitMethod::kLabelsFile;
  cfg.options.init_labels = {0, 1};
  const auto rows = run_benchmark(cfg);
  REQUIRE(rows.size() == 1);
  CHECK(std::isnan(rows[0].error));
  CHECK_FALSE(rows[0].reason.empty());
  const auto summary = summarize(rows);
  CHECK(summary[0].failures == 1);
  CHECK(summary[0].runs == 0);
}

TEST_CASE("summary statistics") {
  std::vector<BenchmarkRow> rows(3);
  for (int i = 0; i < 3; ++i) {
    rows[static_cast<std::size_t>(i)].method = "em";
    rows[static_cast<std::size_t>(i)].replicate = i;
  }
  rows[0].error = 0.1;
  rows[1].error = 0.3;
  rows[2].error = std::numeric_limits<double>::quiet_NaN();
  const auto s = summarize(rows);
  REQUIRE(s.size() == 1);
  CHECK(s[0].mean_error == doctest::Approx(0.2));
  CHECK(s[0].sd_error == doctest::Approx(std::sqrt(0.02)));
  CHECK(s[0].failures == 1);
}

TEST_CASE("configuration errors") {
  auto cfg = small_config();
  cfg.grid = {{"temperature", {1.0}}};
  CHECK_THROWS_AS(run_benchmark(cfg), ConfigError);
  cfg.grid = {{"n", {2.5}}};
  CHECK_THROWS_AS(run_benchmark(cfg), ConfigError);
}
