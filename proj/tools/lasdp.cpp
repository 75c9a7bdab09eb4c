// Command-line front end: simulate, cluster, benchmark, diagnose.
//
// Exit status: 0 success, 2 input/validation error, 3 numeric failure,
// 4 config error.

#include "lasdp/benchmark.hpp"
#include "lasdp/error.hpp"
#include "lasdp/generators.hpp"
#include "lasdp/io.hpp"
#include "lasdp/metrics.hpp"
#include "lasdp/methods.hpp"
#include "lasdp/pipeline.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace lasdp;

constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitConfig = 4;

struct GeneratorArgs {
  std::string family = "common-cond";
  GeneratorSpec spec;

  void add(CLI::App* app) {
    app->add_option("--family", family, "common-cond|hetero-simplex|em-adversarial|random-cov|sample-complexity")
        ->capture_default_str();
    app->add_option("--n", spec.n, "sample count")->capture_default_str();
    app->add_option("--p", spec.p, "dimension")->capture_default_str();
    app->add_option("--k", spec.k, "cluster count")->capture_default_str();
    app->add_option("--lambda,--d", spec.lambda, "separation / center scale")->capture_default_str();
    app->add_option("--L", spec.cond, "condition number parameter")->capture_default_str();
    app->add_option("--gamma", spec.gamma, "em-adversarial scale")->capture_default_str();
    app->add_option("--beta", spec.beta, "random-cov spread")->capture_default_str();
    app->add_option("--cov-seed", spec.cov_seed, "seed of the random-cov covariances")
        ->capture_default_str();
  }

  GeneratorSpec resolve() {
    spec.family = family_from_string(family);
    spec.validate();
    return spec;
  }
};

struct MethodArgs {
  std::string method = "ilasdp";
  std::string init = "hc";
  std::optional<int> init_k;
  std::string init_labels;
  double perturb_alpha = 0.0;
  std::optional<std::string> solver;
  int rank_factor = 2;
  std::optional<int> max_iters;
  std::optional<double> tol;
  bool screen = false;
  bool lda = false;
  std::optional<int> p0;
  double screen_alpha = 0.7;
  double screen_c = 1e10;
  std::optional<int> lda_k_min;
  std::optional<int> lda_k_max;
  double subsample_gamma = 0.3;
  std::string linkage = "ward";
  std::string rounding = "spectral";
  std::uint64_t seed = 0;

  void add(CLI::App* app, bool single_method) {
    if (single_method) {
      app->add_option("--method", method,
                      "ilasdp|lasdp-oracle|sdp|kmeans|em|mem|hc|spectral|sketchlift")
          ->capture_default_str();
    }
    app->add_option("--init", init, "hc|kmeanspp|labels-file|random")->capture_default_str();
    app->add_option("--init-k", init_k, "cluster count of the initializer");
    app->add_option("--init-labels", init_labels, "labels file for --init labels-file");
    app->add_option("--perturb-alpha", perturb_alpha, "fraction of init labels redrawn")
        ->capture_default_str();
    app->add_option("--solver", solver, "admm|bm (default: bm when n > 300)");
    app->add_option("--rank-factor", rank_factor, "BM rank factor s")->capture_default_str();
    app->add_option("--max-iters", max_iters, "outer iterations S (iLA-SDP) / EM iterations");
    app->add_option("--tol", tol, "iLA-SDP eps / EM relative tolerance");
    app->add_flag("--screen", screen, "F-test attribute screening");
    app->add_flag("--lda", lda, "Fisher-LDA reduction");
    app->add_option("--p0", p0, "attributes always kept by screening (default 2K)");
    app->add_option("--screen-alpha", screen_alpha, "keep probability without a clear cutoff")
        ->capture_default_str();
    app->add_option("--screen-c", screen_c, "cutoff ratio C")->capture_default_str();
    app->add_option("--lda-k-min", lda_k_min, "smallest K~ (default K)");
    app->add_option("--lda-k-max", lda_k_max, "largest K~ (default: dimension)");
    app->add_option("--subsample-gamma", subsample_gamma, "sketch probability for sketchlift")
        ->capture_default_str();
    app->add_option("--linkage", linkage, "ward|single|complete|average")->capture_default_str();
    app->add_option("--rounding", rounding, "spectral|blockmass")->capture_default_str();
    app->add_option("--seed", seed, "master seed")->capture_default_str();
  }

  MethodOptions resolve(int k) const {
    MethodOptions opt;
    opt.k = k;
    opt.seed = seed;
    opt.init = init_from_string(init);
    opt.init_k = init_k;
    if (opt.init == InitMethod::kLabelsFile) {
      if (init_labels.empty()) {
        throw ValidationError("--init labels-file needs --init-labels");
      }
      opt.init_labels = io::read_labels_file(init_labels);
    }
    opt.perturb_alpha = perturb_alpha;
    opt.linkage = linkage_from_string(linkage);
    opt.screen = screen;
    opt.p0 = p0;
    opt.screen_alpha = screen_alpha;
    opt.screen_c = screen_c;
    opt.lda = lda;
    opt.lda_k_min = lda_k_min;
    opt.lda_k_max = lda_k_max;
    opt.subsample_gamma = subsample_gamma;
    if (solver) {
      opt.ilasdp.solver = solver_from_string(*solver);
    }
    opt.ilasdp.rank_factor = rank_factor;
    opt.ilasdp.rounding = rounding_from_string(rounding);
    if (max_iters) {
      opt.ilasdp.max_outer = *max_iters;
      opt.max_iters = *max_iters;
    }
    if (tol) {
      opt.ilasdp.eps = *tol;
      opt.tol = *tol;
    }
    return opt;
  }
};

// "lambda=2,4,6" -> axis.
GridAxis parse_axis(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("grid axis '" + text + "' is not of the form name=v1,v2,...");
  }
  GridAxis axis{text.substr(0, eq), {}};
  std::string_view rest(text);
  rest.remove_prefix(eq + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string cell(rest.substr(0, comma));
    try {
      std::size_t used = 0;
      axis.values.push_back(std::stod(cell, &used));
      if (used != cell.size()) {
        throw std::invalid_argument(cell);
      }
    } catch (const std::exception&) {
      throw ConfigError("grid axis '" + axis.name + "': bad value '" + cell + "'");
    }
    if (comma == std::string_view::npos) {
      break;
    }
    rest.remove_prefix(comma + 1);
  }
  return axis;
}

std::vector<Method> parse_methods(const std::vector<std::string>& names) {
  std::vector<Method> out;
  for (const auto& name : names) {
    out.push_back(method_from_string(name));
  }
  return out;
}

std::ofstream open_or_throw(const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw ValidationError("cannot write " + path);
  }
  return out;
}

// Diagnostics of the fitted partition (means and floored covariances).
io::RunMetrics estimated_metrics(const Dataset& data, const Partition& est) {
  io::RunMetrics m;
  m.error = std::numeric_limits<double>::quiet_NaN();
  if (est.has_empty_cluster() || est.k() < 2) {
    m.delta = m.d_min = m.big_m = m.small_m = std::numeric_limits<double>::quiet_NaN();
    return m;
  }
  const std::vector<MatrixXd> covs = init_cov_from_partition(data, est);
  const MatrixXd centers = cluster_means(data.x(), est);
  std::vector<VectorXd> means;
  for (Index c = 0; c < centers.cols(); ++c) {
    means.push_back(centers.col(c));
  }
  const SeparationDiagnostics d = separation_diagnostics(means, covs, est.sizes());
  m.delta = d.delta();
  m.d_min = d.d_min();
  m.big_m = d.big_m;
  m.small_m = d.small_m;
  return m;
}

int run_simulate(GeneratorArgs& gen, std::uint64_t seed, const std::string& out,
                 const std::string& labels_out) {
  GeneratorSpec spec = gen.resolve();
  spec.seed = seed;
  const Dataset data = generate(spec);
  if (out.empty()) {
    io::write_csv(std::cout, data.x());
  } else {
    io::write_csv_file(out, data.x());
  }
  if (!labels_out.empty()) {
    io::write_labels_file(labels_out, Partition(*data.true_labels(), spec.k));
  }
  return 0;
}

struct ClusterArgs {
  std::string input;
  std::string truth;
  std::string out;
  std::string metrics;
  std::string trace;
  int k = 2;
};

int run_cluster(const ClusterArgs& c, const MethodArgs& margs) {
  const io::CsvTable table = io::read_csv_file(c.input);
  Dataset data(table.x);
  const Method method = method_from_string(margs.method);
  MethodOptions opt = margs.resolve(c.k);

  std::optional<Partition> truth;
  if (!c.truth.empty()) {
    std::vector<int> labels = io::read_labels_file(c.truth);
    if (static_cast<Index>(labels.size()) != data.n()) {
      throw DimensionMismatch("truth labels: " + std::to_string(labels.size()) + " labels for " +
                              std::to_string(data.n()) + " samples");
    }
    const int top = *std::max_element(labels.begin(), labels.end()) + 1;
    truth = Partition(labels, top);
  }
  if (method == Method::kLasdpOracle) {
    if (!truth) {
      throw ValidationError("lasdp-oracle needs --truth to estimate the known covariances");
    }
    opt.oracle_covariances = init_cov_from_partition(data, *truth);
  }

  const MethodResult res = run_method(method, data, opt);
  if (c.out.empty()) {
    io::write_labels(std::cout, res.partition);
  } else {
    io::write_labels_file(c.out, res.partition);
  }
  if (!c.trace.empty() && res.trace) {
    auto f = open_or_throw(c.trace);
    write_trace_csv(f, *res.trace);
  }
  if (!c.metrics.empty()) {
    io::RunMetrics m = estimated_metrics(data, res.partition);
    if (truth) {
      m.error = misclustering_error(res.partition, *truth);
    }
    m.iterations = res.iterations;
    m.wall_ms = res.wall_ms;
    m.method = margs.method;
    m.seed = margs.seed;
    io::write_metrics_file(c.metrics, m);
  }
  return 0;
}

struct BenchArgs {
  std::vector<std::string> methods{"ilasdp"};
  std::vector<std::string> grid;
  int replicates = 1;
  int jobs = 1;
  std::string out;
  std::string summary;
  bool no_wall_time = false;
};

int run_bench(const BenchArgs& b, GeneratorArgs& gen, const MethodArgs& margs) {
  BenchmarkConfig cfg;
  cfg.methods = parse_methods(b.methods);
  cfg.base = gen.resolve();
  for (const auto& g : b.grid) {
    cfg.grid.push_back(parse_axis(g));
  }
  cfg.replicates = b.replicates;
  cfg.master_seed = margs.seed;
  cfg.jobs = b.jobs;
  cfg.options = margs.resolve(cfg.base.k);
  const auto rows = run_benchmark(cfg);
  if (b.out.empty()) {
    write_results_csv(std::cout, cfg, rows, !b.no_wall_time);
  } else {
    auto f = open_or_throw(b.out);
    write_results_csv(f, cfg, rows, !b.no_wall_time);
  }
  if (!b.summary.empty()) {
    auto f = open_or_throw(b.summary);
    write_summary_csv(f, cfg, summarize(rows));
  }
  return 0;
}

int run_diagnose(const std::string& input, const std::string& labels, GeneratorArgs& gen,
                 bool from_family) {
  io::RunMetrics m;
  if (from_family) {
    const GeneratorSpec spec = gen.resolve();
    const GmmParams theta = family_params(spec);
    const SeparationDiagnostics d =
        separation_diagnostics(theta.means, theta.covariances, balanced_sizes(spec.n, spec.k));
    m.delta = d.delta();
    m.d_min = d.d_min();
    m.big_m = d.big_m;
    m.small_m = d.small_m;
    m.method = "population";
  } else {
    if (input.empty() || labels.empty()) {
      throw ValidationError("diagnose needs --input and --labels, or --family");
    }
    const Dataset data(io::read_csv_file(input).x);
    std::vector<int> l = io::read_labels_file(labels);
    if (static_cast<Index>(l.size()) != data.n()) {
      throw DimensionMismatch("labels do not match the sample count");
    }
    const int top = *std::max_element(l.begin(), l.end()) + 1;
    m = estimated_metrics(data, Partition(l, top));
    m.method = "labels";
  }
  m.error = std::numeric_limits<double>::quiet_NaN();
  std::cout << io::metrics_json(m) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Likelihood-adjusted SDP clustering toolkit"};
  app.set_config("--config", "", "TOML config file; command-line flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);

  auto* simulate = app.add_subcommand("simulate", "draw a synthetic Gaussian mixture");
  GeneratorArgs sim_gen;
  sim_gen.add(simulate);
  std::uint64_t sim_seed = 0;
  std::string sim_out;
  std::string sim_labels;
  simulate->add_option("--seed", sim_seed, "sampling seed")->capture_default_str();
  simulate->add_option("--out", sim_out, "data CSV (default stdout)");
  simulate->add_option("--labels-out", sim_labels, "true labels file");

  auto* cluster = app.add_subcommand("cluster", "cluster a CSV file");
  ClusterArgs cargs;
  MethodArgs cluster_method;
  cluster->add_option("--input,input", cargs.input, "data CSV, one sample per row")->required();
  cluster->add_option("--k", cargs.k, "cluster count")->capture_default_str();
  cluster->add_option("--truth", cargs.truth, "true labels file (enables the error metric)");
  cluster->add_option("--out", cargs.out, "labels output (default stdout)");
  cluster->add_option("--metrics", cargs.metrics, "metrics JSON output");
  cluster->add_option("--trace", cargs.trace, "iLA-SDP trace CSV output");
  cluster_method.add(cluster, true);

  auto* bench = app.add_subcommand("benchmark", "replicated synthetic experiment");
  BenchArgs bargs;
  GeneratorArgs bench_gen;
  MethodArgs bench_method;
  bench_gen.add(bench);
  bench_method.add(bench, false);
  bench->add_option("--methods", bargs.methods, "methods to compare")->delimiter(',');
  bench->add_option("--grid", bargs.grid, "swept parameter, e.g. lambda=2,4,6 (repeatable)");
  bench->add_option("--replicates", bargs.replicates, "replicates per grid point")
      ->capture_default_str();
  bench->add_option("--jobs", bargs.jobs, "concurrent tasks")
      ->envname("LASDP_JOBS")
      ->capture_default_str();
  bench->add_option("--out", bargs.out, "results CSV (default stdout)");
  bench->add_option("--summary", bargs.summary, "per grid point summary CSV");
  bench->add_flag("--no-wall-time", bargs.no_wall_time, "omit the wall-time column");

  auto* diagnose = app.add_subcommand("diagnose", "separation diagnostics as JSON");
  std::string diag_input;
  std::string diag_labels;
  GeneratorArgs diag_gen;
  diagnose->add_option("--input", diag_input, "data CSV");
  diagnose->add_option("--labels", diag_labels, "labels file");
  diag_gen.add(diagnose);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const CLI::FileError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*simulate) {
      return run_simulate(sim_gen, sim_seed, sim_out, sim_labels);
    }
    if (*cluster) {
      return run_cluster(cargs, cluster_method);
    }
    if (*bench) {
      return run_bench(bargs, bench_gen, bench_method);
    }
    const bool from_family = diagnose->count("--family") > 0;
    return run_diagnose(diag_input, diag_labels, diag_gen, from_family);
  } catch (const lasdp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const lasdp::ValidationError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const lasdp::DimensionMismatch& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const lasdp::DegeneratePartition& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const lasdp::Error& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
