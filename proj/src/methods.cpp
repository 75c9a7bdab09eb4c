#include "lasdp/methods.hpp"

#include "lasdp/enhance.hpp"
#include "lasdp/error.hpp"
#include "lasdp/likelihood.hpp"
#include "lasdp/random.hpp"
#include "lasdp/rounding.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <string>

namespace lasdp {

namespace {

// Stream ids for derive_seed.
constexpr std::uint64_t kInitStream = 11;
constexpr std::uint64_t kPerturbStream = 12;
constexpr std::uint64_t kScreenStream = 13;
constexpr std::uint64_t kMethodStream = 14;
constexpr std::uint64_t kPipelineStream = 15;
constexpr std::uint64_t kRoundStream = 16;

constexpr std::array<std::string_view, 9> kMethodNames = {
    "ilasdp", "lasdp-oracle", "sdp", "kmeans", "em", "mem", "hc", "spectral", "sketchlift"};
constexpr std::array<std::string_view, 4> kInitNames = {"hc", "kmeanspp", "labels-file", "random"};

struct Prepared {
  Dataset data;
  std::vector<MatrixXd> covariances;
};

// Screening then LDA; oracle covariances follow the same linear map.
Prepared prepare(const Dataset& data, const MethodOptions& opt, MethodResult& res) {
  Prepared out{data, opt.oracle_covariances};
  if (opt.screen) {
    const int p0 = std::min<int>(opt.p0.value_or(2 * opt.k), static_cast<int>(data.p()));
    const ScreenResult s = ftest_screen(out.data, opt.k, p0, opt.screen_alpha, opt.screen_c,
                                        derive_seed(opt.seed, kScreenStream), opt.linkage);
    res.selected = s.selected;
    out.data = out.data.select_features(s.selected);
    for (auto& sigma : out.covariances) {
      MatrixXd sub(static_cast<Index>(s.selected.size()), static_cast<Index>(s.selected.size()));
      for (std::size_t a = 0; a < s.selected.size(); ++a) {
        for (std::size_t b = 0; b < s.selected.size(); ++b) {
          sub(static_cast<Index>(a), static_cast<Index>(b)) = sigma(s.selected[a], s.selected[b]);
        }
      }
      sigma = sub;
    }
  }
  if (opt.lda) {
    const int p = static_cast<int>(out.data.p());
    const int lo = opt.lda_k_min.value_or(std::max(opt.k, 2));
    const int hi = opt.lda_k_max.value_or(p);
    const LdaResult l = lda_reduce(out.data, lo, hi, opt.k, opt.linkage);
    res.lda_k_tilde = l.k_tilde;
    out.data = Dataset(l.transformed, out.data.true_labels());
    for (auto& sigma : out.covariances) {
      sigma = l.directions.transpose() * sigma * l.directions;
    }
  }
  return out;
}

Partition fit_to_k(const MatrixXd& x, const Partition& init, int k) {
  if (init.k() < k) {
    throw ValidationError("initializer produced " + std::to_string(init.k()) +
                          " clusters, fewer than K = " + std::to_string(k));
  }
  return init.k() == k ? init : merge_to_k(x, init, k);
}

IlasdpConfig pipeline_config(const MethodOptions& opt) {
  IlasdpConfig cfg = opt.ilasdp;
  cfg.seed = derive_seed(opt.seed, kPipelineStream);
  return cfg;
}

}  // namespace

std::string_view to_string(Method m) { return kMethodNames[static_cast<std::size_t>(m)]; }

Method method_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kMethodNames.size(); ++i) {
    if (kMethodNames[i] == name) {
      return static_cast<Method>(i);
    }
  }
  throw ValidationError("unknown method '" + std::string(name) + "'");
}

std::string_view to_string(InitMethod m) { return kInitNames[static_cast<std::size_t>(m)]; }

InitMethod init_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kInitNames.size(); ++i) {
    if (kInitNames[i] == name) {
      return static_cast<InitMethod>(i);
    }
  }
  throw ValidationError("unknown init method '" + std::string(name) + "'");
}

Partition initial_partition(const Dataset& data, const MethodOptions& opt) {
  const int k = opt.k;
  const int ik = opt.init_k.value_or(k);
  if (ik < 1 || ik > data.n()) {
    throw ValidationError("init-k must lie in [1, n]");
  }
  const MatrixXd& x = data.x();
  const std::uint64_t seed = derive_seed(opt.seed, kInitStream);
  Partition init;
  switch (opt.init) {
    case InitMethod::kHc:
      init = fit_to_k(x, hierarchical(x, ik, opt.linkage), k);
      break;
    case InitMethod::kKmeanspp:
      init = fit_to_k(x, kmeans(x, ik, seed).partition, k);
      break;
    case InitMethod::kLabelsFile: {
      if (static_cast<Index>(opt.init_labels.size()) != data.n()) {
        throw DimensionMismatch("init labels: " + std::to_string(opt.init_labels.size()) +
                                " labels for " + std::to_string(data.n()) + " samples");
      }
      const int top = *std::max_element(opt.init_labels.begin(), opt.init_labels.end()) + 1;
      init = fit_to_k(x, Partition(opt.init_labels, std::max(top, k)), k);
      break;
    }
    case InitMethod::kRandom:
      init = random_partition(data.n(), k, seed);
      break;
  }
  if (opt.perturb_alpha > 0.0) {
    init = perturb_labels(init, opt.perturb_alpha, derive_seed(opt.seed, kPerturbStream));
  }
  return init;
}

MethodResult run_kmeans_sdp(const Dataset& data, const MethodOptions& opt) {
  MethodResult res;
  const MatrixXd identity = MatrixXd::Identity(data.p(), data.p());
  SdpProblem problem = SdpProblem::kmeans(similarity_matrix(data, identity, 0).a, opt.k);
  const SolverKind solver = resolve_solver(opt.ilasdp, data.n());
  problem.admm = opt.ilasdp.admm;
  problem.bm = opt.ilasdp.bm;
  SdpSolution sol;
  if (solver == SolverKind::kAdmm) {
    sol = solve_lasdp_admm(problem);
  } else {
    problem.factors.push_back(similarity_factors(data, identity));
    sol = solve_lasdp_bm(problem, opt.ilasdp.rank_factor, derive_seed(opt.seed, kMethodStream));
  }
  res.partition = spectral_round(sol.z.block(0), opt.k, derive_seed(opt.seed, kRoundStream),
                                 opt.ilasdp.round_restarts);
  res.iterations = sol.report.iterations;
  return res;
}

MethodResult run_method(Method method, const Dataset& raw, const MethodOptions& opt) {
  if (opt.k < 1 || opt.k > raw.n()) {
    throw ValidationError("K must lie in [1, n]");
  }
  if (!(opt.perturb_alpha >= 0.0 && opt.perturb_alpha <= 1.0)) {
    throw ValidationError("perturbation fraction must lie in [0, 1]");
  }
  const auto start = std::chrono::steady_clock::now();
  MethodResult res;
  const Prepared prep = prepare(raw, opt, res);
  const Dataset& data = prep.data;
  const MatrixXd& x = data.x();
  const std::uint64_t seed = derive_seed(opt.seed, kMethodStream);

  switch (method) {
    case Method::kIlasdp: {
      LasdpResult r = ilasdp(data, initial_partition(data, opt), pipeline_config(opt));
      res.partition = std::move(r.partition);
      res.iterations = r.trace.iterations;
      res.trace = std::move(r.trace);
      break;
    }
    case Method::kLasdpOracle: {
      if (static_cast<int>(prep.covariances.size()) != opt.k) {
        throw ValidationError("lasdp-oracle needs K known covariances");
      }
      LasdpResult r = oracle_lasdp(data, prep.covariances, pipeline_config(opt));
      res.partition = std::move(r.partition);
      res.iterations = r.report.iterations;
      res.trace = std::move(r.trace);
      break;
    }
    case Method::kSdp: {
      MethodResult r = run_kmeans_sdp(data, opt);
      res.partition = std::move(r.partition);
      res.iterations = r.iterations;
      break;
    }
    case Method::kKmeans: {
      KmeansResult r = kmeans(x, opt.k, seed);
      res.partition = std::move(r.partition);
      res.iterations = r.iterations;
      break;
    }
    case Method::kEm: {
      EmResult r = em_gmm(data, opt.k, initial_partition(data, opt), opt.max_iters, opt.tol);
      res.partition = std::move(r.partition);
      res.iterations = r.iterations;
      break;
    }
    case Method::kMem: {
      EmResult r = mem(data, opt.k, seed, opt.max_iters, opt.tol);
      res.partition = std::move(r.partition);
      res.iterations = r.iterations;
      break;
    }
    case Method::kHc:
      res.partition = hierarchical(x, opt.k, opt.linkage);
      break;
    case Method::kSpectral:
      res.partition = spectral_clustering(x, opt.k, seed);
      break;
    case Method::kSketchLift: {
      SketchResult r =
          sketch_and_lift(data, opt.k, opt.subsample_gamma, pipeline_config(opt), seed, opt.linkage);
      res.partition = std::move(r.partition);
      res.iterations = r.sketch_fit.trace.iterations;
      res.trace = std::move(r.sketch_fit.trace);
      break;
    }
  }
  res.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return res;
}

}  // namespace lasdp
