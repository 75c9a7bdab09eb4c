// Serial reference kernels against their OpenMP versions.
//
//   bench_kernels --benchmark_filter=similarity
//
// Thread count follows OMP_NUM_THREADS.

#include "lasdp/kernels.hpp"
#include "lasdp/sdp.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using lasdp::kernels::Index;
using lasdp::kernels::MatrixXd;

MatrixXd gaussian(Index rows, Index cols, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  MatrixXd m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) {
    m(i) = z(rng);
  }
  return m;
}

MatrixXd spd(Index p) {
  const MatrixXd a = gaussian(p, p, 7);
  return a * a.transpose() + MatrixXd::Identity(p, p);
}

template <MatrixXd (*F)(const MatrixXd&, const MatrixXd&, double)>
void similarity(benchmark::State& state) {
  const MatrixXd x = gaussian(20, state.range(0), 1);
  const MatrixXd prec = spd(20);
  for (auto _ : state) {
    benchmark::DoNotOptimize(F(x, prec, 0.5));
  }
  state.SetComplexityN(state.range(0));
}

template <MatrixXd (*F)(const MatrixXd&, const MatrixXd&)>
void scatter(benchmark::State& state) {
  const Index n = state.range(0);
  const MatrixXd x = gaussian(20, n, 2);
  const MatrixXd z = gaussian(n, n, 3).cwiseAbs();
  for (auto _ : state) {
    benchmark::DoNotOptimize(F(x, z));
  }
}

template <MatrixXd (*F)(const MatrixXd&)>
void pairwise(benchmark::State& state) {
  const MatrixXd x = gaussian(20, state.range(0), 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(F(x));
  }
}

template <void (*F)(const MatrixXd&, const MatrixXd&, std::vector<int>&, lasdp::kernels::VectorXd&)>
void assign(benchmark::State& state) {
  const MatrixXd x = gaussian(20, state.range(0), 5);
  const MatrixXd c = gaussian(20, 8, 6);
  std::vector<int> labels;
  lasdp::kernels::VectorXd d;
  for (auto _ : state) {
    F(x, c, labels, d);
    benchmark::DoNotOptimize(labels.data());
  }
}

template <void (*F)(std::vector<MatrixXd>&)>
void psd_blocks(benchmark::State& state) {
  const Index n = state.range(0);
  std::vector<MatrixXd> base;
  for (unsigned b = 0; b < 4; ++b) {
    const MatrixXd g = gaussian(n, n, 10 + b);
    base.push_back(0.5 * (g + g.transpose()));
  }
  for (auto _ : state) {
    auto blocks = base;
    F(blocks);
    benchmark::DoNotOptimize(blocks.data());
  }
}

void admm_solve(benchmark::State& state) {
  const Index n = state.range(0);
  std::vector<MatrixXd> a;
  for (unsigned b = 0; b < 3; ++b) {
    const MatrixXd x = gaussian(4, n, 20 + b);
    a.push_back(lasdp::kernels::similarity(x, MatrixXd::Identity(4, 4), 0.0));
  }
  auto problem = lasdp::SdpProblem::lasdp(a);
  problem.admm.max_iters = 50;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lasdp::solve_lasdp_admm(problem).objective);
  }
}

namespace k = lasdp::kernels;

BENCHMARK(similarity<k::serial::similarity>)->Name("similarity/serial")->RangeMultiplier(2)->Range(128, 1024);
BENCHMARK(similarity<k::omp::similarity>)->Name("similarity/omp")->RangeMultiplier(2)->Range(128, 1024);
BENCHMARK(scatter<k::serial::scatter>)->Name("scatter/serial")->RangeMultiplier(2)->Range(128, 1024);
BENCHMARK(scatter<k::omp::scatter>)->Name("scatter/omp")->RangeMultiplier(2)->Range(128, 1024);
BENCHMARK(pairwise<k::serial::pairwise_sq_dists>)->Name("pairwise/serial")->RangeMultiplier(2)->Range(128, 1024);
BENCHMARK(pairwise<k::omp::pairwise_sq_dists>)->Name("pairwise/omp")->RangeMultiplier(2)->Range(128, 1024);
BENCHMARK(assign<k::serial::assign_nearest>)->Name("assign/serial")->RangeMultiplier(4)->Range(1024, 16384);
BENCHMARK(assign<k::omp::assign_nearest>)->Name("assign/omp")->RangeMultiplier(4)->Range(1024, 16384);
BENCHMARK(psd_blocks<k::serial::project_psd_blocks>)->Name("psd_blocks/serial")->Arg(60)->Arg(120)->Arg(200);
BENCHMARK(psd_blocks<k::omp::project_psd_blocks>)->Name("psd_blocks/omp")->Arg(60)->Arg(120)->Arg(200);
BENCHMARK(admm_solve)->Name("admm_50_iterations")->Arg(60)->Arg(120)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
