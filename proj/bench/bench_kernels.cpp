#include "coxcheck/conditions.hpp"
#include "coxcheck/forms.hpp"
#include "coxcheck/generators.hpp"
#include "coxcheck/kernels.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using namespace coxcheck;

std::vector<kernels::Triple> random_cloud(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<kernels::Triple> out(n);
  for (auto& t : out) t = {u(rng), u(rng), u(rng)};
  return out;
}

std::vector<kernels::Triple> grid_targets(std::size_t n) {
  std::vector<kernels::Triple> out;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        out.push_back({double(i) / double(n - 1), double(j) / double(n - 1), double(k) / double(n - 1)});
  return out;
}

void BM_NearestSerial(benchmark::State& state) {
  auto cloud = random_cloud(static_cast<std::size_t>(state.range(0)), 1);
  auto targets = grid_targets(11);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::nearest_serial(targets, cloud));
}
BENCHMARK(BM_NearestSerial)->Arg(10000)->Arg(100000);

void BM_NearestSorted(benchmark::State& state) {
  auto cloud = random_cloud(static_cast<std::size_t>(state.range(0)), 1);
  auto targets = grid_targets(11);
  kernels::SortedCloud sorted(cloud);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::nearest_sorted(targets, sorted, false));
}
BENCHMARK(BM_NearestSorted)->Arg(10000)->Arg(100000);

void BM_AssociativityResidual(benchmark::State& state) {
  auto f = CombinationForm::catalog(CombinationForm::Catalog::hamacher);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(check_functional_equation(f, EquationId::associativity, n));
}
BENCHMARK(BM_AssociativityResidual)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_ExtractCombination(benchmark::State& state) {
  Domain d({"a", "b", "c", "d", "e", "f"});
  std::vector<Rational> w{Rational(1, 21), Rational(2, 21), Rational(3, 21),
                          Rational(4, 21), Rational(5, 21), Rational(6, 21)};
  auto b = gen_probability(d, w).materialize();
  for (auto _ : state) benchmark::DoNotOptimize(extract_combination(b));
}
BENCHMARK(BM_ExtractCombination)->Unit(benchmark::kMillisecond);

void BM_Decide(benchmark::State& state) {
  Domain d({"a", "b", "c", "d"});
  auto b = gen_distorted(d, {Rational(1, 10), Rational(2, 10), Rational(3, 10), Rational(4, 10)}, 2);
  for (auto _ : state) benchmark::DoNotOptimize(decide(b));
}
BENCHMARK(BM_Decide)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
