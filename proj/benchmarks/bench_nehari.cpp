#include <benchmark/benchmark.h>

#include <random>

#include "nehari/problem.hpp"
#include "nehari/solvers.hpp"
#include "nehari/thresholds.hpp"

namespace {

using namespace nehari;

ProblemInstance ind1d(int n) {
  auto mesh = std::make_shared<const Mesh>(Mesh::interval(n, 1.0, BoundaryCondition::Dirichlet));
  return instantiate_indefinite(mesh, 2.0, 4.0, WeightSpec::piecewise({{Box{0.0, 0.5}, 1.0}}, -2.0));
}

ProblemInstance square(int cells) {
  auto mesh = std::make_shared<const Mesh>(Mesh::rectangle(cells, cells, 1.0, 1.0, BoundaryCondition::Dirichlet));
  return instantiate_indefinite(mesh, 2.0, 4.0, WeightSpec::piecewise({{Box{0.0, 0.5, 0.0, 1.0}, 1.0}}, -2.0));
}

void BM_TripleWithGradient1D(benchmark::State& state) {
  const ProblemInstance pi = ind1d(static_cast<int>(state.range(0)));
  std::mt19937_64 rng(7);
  std::normal_distribution<double> d;
  Vector u(pi.dof_count());
  for (auto& x : u) {
    x = d(rng);
  }
  TripleGradient g;
  for (auto _ : state) {
    benchmark::DoNotOptimize(pi.triple(u, g));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_TripleWithGradient1D)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_TripleWithGradient2D(benchmark::State& state) {
  const ProblemInstance pi = square(static_cast<int>(state.range(0)));
  Vector u = Vector::Ones(pi.dof_count());
  TripleGradient g;
  for (auto _ : state) {
    benchmark::DoNotOptimize(pi.triple(u, g));
  }
}
BENCHMARK(BM_TripleWithGradient2D)->Arg(16)->Arg(32)->Arg(64);

void BM_Lambda1(benchmark::State& state) {
  const ProblemInstance pi = ind1d(static_cast<int>(state.range(0)));
  const ThresholdOptions opt;
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_lambda1(pi, opt));
  }
}
BENCHMARK(BM_Lambda1)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_Thresholds(benchmark::State& state) {
  const ProblemInstance pi = ind1d(static_cast<int>(state.range(0)));
  const ThresholdOptions opt;
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_thresholds(pi, opt));
  }
}
BENCHMARK(BM_Thresholds)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond)->Iterations(2);

void BM_BranchSolve(benchmark::State& state) {
  const ProblemInstance pi = ind1d(static_cast<int>(state.range(0)));
  const SolverConfig cfg;
  const NehariBranch b = state.range(1) == 0 ? NehariBranch::Plus : NehariBranch::Minus;
  for (auto _ : state) {
    benchmark::DoNotOptimize(minimize_on_nehari(pi, 10.1, b, cfg));
  }
}
BENCHMARK(BM_BranchSolve)->Args({100, 0})->Args({100, 1})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
