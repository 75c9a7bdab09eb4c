#include "lasdp/benchmark.hpp"

#include "lasdp/error.hpp"
#include "lasdp/metrics.hpp"
#include "lasdp/random.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <tuple>

namespace lasdp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kMethodSeedSalt = 0x6d657468ULL;

Index as_count(const std::string& name, double value) {
  if (!(value >= 1.0) || value != std::floor(value)) {
    throw ConfigError("grid axis '" + name + "' needs positive integer values");
  }
  return static_cast<Index>(value);
}

BenchmarkRow run_one(const BenchmarkConfig& cfg, Method method, std::size_t g, int rep) {
  BenchmarkRow row;
  row.method = std::string(to_string(method));
  row.grid_index = g;
  row.params = grid_point(cfg, g);
  row.replicate = rep;
  row.seed = derive_seed(cfg.master_seed, g, static_cast<std::uint64_t>(rep));
  try {
    GeneratorSpec spec = cfg.base;
    MethodOptions opt = cfg.options;
    for (std::size_t a = 0; a < cfg.grid.size(); ++a) {
      apply_param(spec, opt, cfg.grid[a].name, row.params[a]);
    }
    spec.seed = row.seed;
    opt.k = spec.k;
    opt.seed = derive_seed(row.seed, kMethodSeedSalt);
    const Dataset data = generate(spec);
    if (method == Method::kLasdpOracle) {
      opt.oracle_covariances = family_params(spec).covariances;
    }
    const MethodResult res = run_method(method, data, opt);
    row.error = misclustering_error(res.partition, Partition(*data.true_labels(), spec.k));
    row.iterations = res.iterations;
    row.wall_ms = res.wall_ms;
  } catch (const std::exception& e) {
    row.error = kNaN;
    row.reason = e.what();
  }
  return row;
}

void write_param_header(std::ostream& out, const BenchmarkConfig& cfg) {
  for (const auto& axis : cfg.grid) {
    out << ',' << axis.name;
  }
}

}  // namespace

void BenchmarkConfig::validate() const {
  if (methods.empty()) {
    throw ConfigError("benchmark: no methods given");
  }
  if (replicates < 1) {
    throw ConfigError("benchmark: replicates must be >= 1");
  }
  if (jobs < 1) {
    throw ConfigError("benchmark: jobs must be >= 1");
  }
  for (const auto& axis : grid) {
    if (axis.values.empty()) {
      throw ConfigError("grid axis '" + axis.name + "' has no values");
    }
    GeneratorSpec spec = base;
    MethodOptions opt = options;
    for (double v : axis.values) {
      apply_param(spec, opt, axis.name, v);
    }
  }
  base.validate();
}

std::size_t BenchmarkConfig::grid_size() const {
  std::size_t size = 1;
  for (const auto& axis : grid) {
    size *= axis.values.size();
  }
  return size;
}

std::vector<double> grid_point(const BenchmarkConfig& cfg, std::size_t index) {
  std::vector<double> out(cfg.grid.size());
  for (std::size_t a = cfg.grid.size(); a-- > 0;) {
    const auto& values = cfg.grid[a].values;
    out[a] = values[index % values.size()];
    index /= values.size();
  }
  return out;
}

void apply_param(GeneratorSpec& spec, MethodOptions& opt, const std::string& name, double value) {
  if (name == "n") {
    spec.n = as_count(name, value);
  } else if (name == "p") {
    spec.p = as_count(name, value);
  } else if (name == "k") {
    spec.k = static_cast<int>(as_count(name, value));
  } else if (name == "lambda" || name == "d") {
    spec.lambda = value;
  } else if (name == "L") {
    spec.cond = value;
  } else if (name == "gamma") {
    spec.gamma = value;
  } else if (name == "beta") {
    spec.beta = value;
  } else if (name == "alpha") {
    opt.perturb_alpha = value;
  } else if (name == "subsample_gamma") {
    opt.subsample_gamma = value;
  } else {
    throw ConfigError("unknown grid parameter '" + name + "'");
  }
}

std::vector<BenchmarkRow> run_benchmark(const BenchmarkConfig& cfg) {
  cfg.validate();
  const std::size_t grid = cfg.grid_size();
  const std::size_t reps = static_cast<std::size_t>(cfg.replicates);
  const std::size_t per_method = grid * reps;
  const std::size_t total = cfg.methods.size() * per_method;
  std::vector<BenchmarkRow> rows(total);

  // Each task writes its own slot; seeds depend only on (grid, replicate).
#pragma omp parallel for schedule(dynamic, 1) num_threads(cfg.jobs)
  for (std::size_t t = 0; t < total; ++t) {
    const std::size_t m = t / per_method;
    const std::size_t g = (t % per_method) / reps;
    const int rep = static_cast<int>(t % reps);
    rows[t] = run_one(cfg, cfg.methods[m], g, rep);
  }

  std::stable_sort(rows.begin(), rows.end(), [](const BenchmarkRow& a, const BenchmarkRow& b) {
    return std::tie(a.method, a.grid_index, a.replicate) <
           std::tie(b.method, b.grid_index, b.replicate);
  });
  return rows;
}

void write_results_csv(std::ostream& out, const BenchmarkConfig& cfg,
                       const std::vector<BenchmarkRow>& rows, bool with_wall_time) {
  out << "method,grid";
  write_param_header(out, cfg);
  out << ",replicate,seed,error,iterations";
  if (with_wall_time) {
    out << ",wall_ms";
  }
  out << ",reason\n";
  out.precision(10);
  for (const auto& r : rows) {
    out << r.method << ',' << r.grid_index;
    for (double v : r.params) {
      out << ',' << v;
    }
    out << ',' << r.replicate << ',' << r.seed << ',';
    if (std::isfinite(r.error)) {
      out << r.error;
    } else {
      out << "NaN";
    }
    out << ',' << r.iterations;
    if (with_wall_time) {
      out << ',' << r.wall_ms;
    }
    std::string reason = r.reason;
    std::replace(reason.begin(), reason.end(), '"', '\'');
    out << ",\"" << reason << "\"\n";
  }
}

std::vector<SummaryRow> summarize(const std::vector<BenchmarkRow>& rows) {
  std::map<std::pair<std::string, std::size_t>, std::vector<const BenchmarkRow*>> groups;
  for (const auto& r : rows) {
    groups[{r.method, r.grid_index}].push_back(&r);
  }
  std::vector<SummaryRow> out;
  for (const auto& [key, members] : groups) {
    SummaryRow s;
    s.method = key.first;
    s.grid_index = key.second;
    s.params = members.front()->params;
    double sum = 0.0;
    double sum_sq = 0.0;
    double wall = 0.0;
    for (const auto* r : members) {
      if (std::isfinite(r->error)) {
        ++s.runs;
        sum += r->error;
        sum_sq += r->error * r->error;
        wall += r->wall_ms;
      } else {
        ++s.failures;
      }
    }
    if (s.runs > 0) {
      s.mean_error = sum / s.runs;
      s.mean_wall_ms = wall / s.runs;
      s.sd_error = s.runs > 1 ? std::sqrt(std::max(0.0, (sum_sq - s.runs * s.mean_error * s.mean_error) /
                                                             (s.runs - 1)))
                              : 0.0;
    } else {
      s.mean_error = kNaN;
      s.sd_error = kNaN;
      s.mean_wall_ms = kNaN;
    }
    out.push_back(std::move(s));
  }
  return out;
}

void write_summary_csv(std::ostream& out, const BenchmarkConfig& cfg,
                       const std::vector<SummaryRow>& rows) {
  out << "method,grid";
  write_param_header(out, cfg);
  out << ",mean_error,sd_error,runs,failures,mean_wall_ms\n";
  out.precision(10);
  for (const auto& s : rows) {
    out << s.method << ',' << s.grid_index;
    for (double v : s.params) {
      out << ',' << v;
    }
    out << ',' << s.mean_error << ',' << s.sd_error << ',' << s.runs << ',' << s.failures << ','
        << s.mean_wall_ms << '\n';
  }
}

}  // namespace lasdp
