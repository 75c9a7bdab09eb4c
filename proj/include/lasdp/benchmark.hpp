#pragma once

// Replicated synthetic experiments: every (method, grid point, replicate)
// becomes one row of a long-format table.

#include "lasdp/generators.hpp"
#include "lasdp/methods.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace lasdp {

/// One swept parameter. Recognized names: n, p, k, lambda, L, gamma, beta
/// (generator) and alpha (init perturbation), subsample_gamma.
struct GridAxis {
  std::string name;
  std::vector<double> values;
};

struct BenchmarkConfig {
  std::vector<Method> methods;
  GeneratorSpec base;
  /// Cartesian product; the last axis varies fastest.
  std::vector<GridAxis> grid;
  int replicates = 1;
  std::uint64_t master_seed = 0;
  int jobs = 1;
  /// Shared method options; k is taken from the generator spec and the
  /// lasdp-oracle covariances from the generating model.
  MethodOptions options;

  void validate() const;
  std::size_t grid_size() const;
};

struct BenchmarkRow {
  std::string method;
  std::size_t grid_index = 0;
  std::vector<double> params;
  int replicate = 0;
  std::uint64_t seed = 0;
  /// NaN when the method failed.
  double error = 0.0;
  int iterations = 0;
  double wall_ms = 0.0;
  /// Empty on success, otherwise the failure message.
  std::string reason;
};

/// Parameter values of grid point `index`, in axis order.
std::vector<double> grid_point(const BenchmarkConfig& cfg, std::size_t index);

/// Applies one named parameter to a generator spec / method options.
void apply_param(GeneratorSpec& spec, MethodOptions& opt, const std::string& name, double value);

/// Rows sorted by (method, grid index, replicate). Data for replicate r at
/// grid point g is generated from derive_seed(master_seed, g, r), so all
/// methods see the same samples.
std::vector<BenchmarkRow> run_benchmark(const BenchmarkConfig& cfg);

void write_results_csv(std::ostream& out, const BenchmarkConfig& cfg,
                       const std::vector<BenchmarkRow>& rows, bool with_wall_time = true);

struct SummaryRow {
  std::string method;
  std::size_t grid_index = 0;
  std::vector<double> params;
  double mean_error = 0.0;
  double sd_error = 0.0;
  int runs = 0;
  int failures = 0;
  double mean_wall_ms = 0.0;
};

/// Mean and standard deviation of the error over successful replicates.
std::vector<SummaryRow> summarize(const std::vector<BenchmarkRow>& rows);
void write_summary_csv(std::ostream& out, const BenchmarkConfig& cfg,
                       const std::vector<SummaryRow>& rows);

}  // namespace lasdp
