#include <benchmark/benchmark.h>

#include <random>

#include "sbadmm/experiments.hpp"

using namespace sbadmm;

namespace {

ImageGrid noise(GridShape s, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  ImageGrid g(s);
  for (double& v : g.values()) v = n(rng);
  return g;
}

RestorationProblem problem(std::size_t n, MaskMode mode) {
  ExperimentConfig c;
  c.phantom_height = n;
  c.phantom_width = n;
  c.mask_mode = mode;
  return make_problem(c).problem;
}

void BM_BlurForward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto k = ConvolutionKernel::gaussian(7, 2.0);
  const ImageGrid x = noise({n, n}, 1);
  for (auto _ : state) benchmark::DoNotOptimize(blur_forward(k, x));
}
BENCHMARK(BM_BlurForward)->Arg(64)->Arg(256);

void BM_CirculantSolve(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = problem(n, MaskMode::periodic);
  const ImageGrid rhs = noise({n, n}, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(circulant_solve(p.lambda(), p.omega(), 1.0, p.alpha(), rhs));
  }
}
BENCHMARK(BM_CirculantSolve)->Arg(64)->Arg(256);

void BM_Pcg3(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = problem(n, MaskMode::masked);
  const ImageGrid rhs = noise({n, n}, 3);
  InnerSolveConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        solve_x_update(p, 1.0, p.alpha(), rhs, ImageGrid(p.shape()), cfg));
  }
}
BENCHMARK(BM_Pcg3)->Arg(64)->Arg(256);

void BM_OuterStep(benchmark::State& state) {
  const auto p = problem(64, MaskMode::masked);
  OuterConfig cfg;
  cfg.algorithm = static_cast<Algorithm>(state.range(0));
  cfg.eta = p.alpha();
  const SolverState s0 = step(canonical_init(p, 1.0, p.alpha()), p, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(step(s0, p, cfg));
  state.SetLabel(to_string(cfg.algorithm));
}
BENCHMARK(BM_OuterStep)
    ->Arg(static_cast<int>(Algorithm::sb))
    ->Arg(static_cast<int>(Algorithm::admm2))
    ->Arg(static_cast<int>(Algorithm::admm2_simplified));

void BM_ClosedFormStep(benchmark::State& state) {
  const auto p = problem(64, MaskMode::periodic);
  const SolverState s0 = canonical_init(p, 20.0, 20 * p.alpha());
  for (auto _ : state) benchmark::DoNotOptimize(quadratic_closed_form_step(s0, p, 20.0, 20 * p.alpha()));
}
BENCHMARK(BM_ClosedFormStep);

}  // namespace
BENCHMARK_MAIN();
