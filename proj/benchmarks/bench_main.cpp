#include <benchmark/benchmark.h>

#include <random>

#include "tpshift/density.hpp"
#include "tpshift/generator.hpp"
#include "tpshift/sigret.hpp"
#include "tpshift/sispace.hpp"

using namespace tpshift;

namespace {

GeneratorParams preset(int m) {
  const std::vector<double> all{0.35, -0.25, 0.3};
  return make_params(1, 1, std::vector<double>(all.begin(), all.begin() + m));
}

CoeffSeq random_coeffs(long offset, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  CoeffSeq c{offset, {}};
  for (std::size_t i = 0; i < n; ++i) c.coeffs.push_back(static_cast<double>(rng() >> 11) * 0x1p-52 - 1.0);
  return c;
}

void BM_BuildTable(benchmark::State& state) {
  const auto p = preset(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_table(p, 4.0, 0.01));
}
BENCHMARK(BM_BuildTable)->Arg(0)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_EvalF(benchmark::State& state) {
  const SISFunction f(preset(static_cast<int>(state.range(0))), random_coeffs(0, 40, 1));
  double x = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval_f(f, x));
    x = x > 40.0 ? 0.0 : x + 0.013;
  }
}
BENCHMARK(BM_EvalF)->Arg(0)->Arg(3);

void BM_FindZeros(benchmark::State& state) {
  const SISFunction f(preset(static_cast<int>(state.range(0))), random_coeffs(-20, 40, 2));
  for (auto _ : state) benchmark::DoNotOptimize(find_zeros(f, {-20, 20}));
}
BENCHMARK(BM_FindZeros)->Arg(0)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_CircLattice(benchmark::State& state) {
  std::vector<double> pts;
  for (int k = -2000; k <= 2000; ++k) pts.push_back(k);
  const auto lambda = PointSet::from_points(pts);
  for (auto _ : state) benchmark::DoNotOptimize(circ_density_lattice(lambda, 1.0, {static_cast<double>(state.range(0))}));
}
BENCHMARK(BM_CircLattice)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_SolveSigns(benchmark::State& state) {
  const auto p = preset(1);
  const SISFunction f(p, random_coeffs(0, 20, 3));
  std::vector<double> pts;
  const double d = static_cast<double>(state.range(0)) / 10.0;
  for (int j = 0; (j + 0.5) / d - 2.0 <= 21.0; ++j) pts.push_back((j + 0.5) / d - 2.0);
  const auto sample = sample_magnitudes(f, PointSet::from_points(pts, {-2, 21}));
  for (auto _ : state) benchmark::DoNotOptimize(solve_signs(p, sample, {0, 19}, 25));
}
BENCHMARK(BM_SolveSigns)->Arg(25)->Arg(30)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
