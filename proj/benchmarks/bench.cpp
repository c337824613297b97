#include <benchmark/benchmark.h>

#include <numbers>
#include <random>

#include "qsyn/hinf.hpp"
#include "qsyn/riccati.hpp"
#include "qsyn/synthesis.hpp"

namespace {

using namespace qsyn;

OpoParams opo() {
  OpoParams p;
  p.kappa1 = 0.0011;
  p.kappa2 = 0.8264;
  p.chi = 0.0414;
  p.phase_range = {-std::numbers::pi, std::numbers::pi};
  return p;
}

Matrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c) {
  std::normal_distribution<double> g;
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = g(rng);
  return m;
}

void BM_SolveCare(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  const Matrix a = random_matrix(rng, n, n);
  const Matrix b = random_matrix(rng, n, n);
  const Matrix c = random_matrix(rng, n, n);
  const RiccatiProblem prob(a, b * b.transpose(), c.transpose() * c);
  for (auto _ : state) benchmark::DoNotOptimize(solve_care(prob));
}
BENCHMARK(BM_SolveCare)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

void BM_HinfNorm(benchmark::State& state) {
  const auto plant = build_plant(opo(), Decomposition::kActive);
  const auto cl = close_loop(plant, synthesize(plant, 0.05, 1.0), 0.3, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(hinf_norm(cl));
}
BENCHMARK(BM_HinfNorm);

void BM_Sweep(benchmark::State& state) {
  const auto plant = build_plant(opo(), Decomposition::kPassive);
  const auto ctrl = synthesize(plant, 0.05, 1.0);
  const auto grid = linspace(-std::numbers::pi, std::numbers::pi,
                             static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sweep(plant, ctrl, grid, BetaMode::zero()));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Sweep)->Arg(64)->Arg(629)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
