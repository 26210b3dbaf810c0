#include <benchmark/benchmark.h>

#include <cmath>
#include <numeric>

#include "credkit/attribution.hpp"
#include "credkit/rng.hpp"

using namespace credkit;

static void BM_ShapleyExact(benchmark::State& state) {
  const std::size_t d = static_cast<std::size_t>(state.range(0));
  Rng rng(11, 0);
  std::vector<double> w(d), x(d);
  for (std::size_t j = 0; j < d; ++j) {
    w[j] = rng.next_normal();
    x[j] = rng.next_normal();
  }
  attribution::PredictFn f = [w](std::span<const double> v) {
    double acc = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) acc += w[j] * v[j];
    return std::tanh(acc);
  };
  attribution::ShapConfig config;
  config.background = Matrix(8, d);
  for (double& v : config.background.data) v = rng.next_normal();
  std::vector<std::size_t> active(d);
  std::iota(active.begin(), active.end(), std::size_t{0});
  for (auto _ : state) {
    benchmark::DoNotOptimize(attribution::shapley_exact(f, x, active, config));
  }
}
BENCHMARK(BM_ShapleyExact)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

static void BM_ShapleySampled79(benchmark::State& state) {
  const std::size_t d = 79;
  Rng rng(12, 0);
  std::vector<double> w(d), x(d);
  for (std::size_t j = 0; j < d; ++j) {
    w[j] = rng.next_normal();
    x[j] = rng.next_normal();
  }
  attribution::PredictFn f = [w](std::span<const double> v) {
    double acc = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) acc += w[j] * v[j];
    return std::tanh(acc);
  };
  attribution::ShapConfig config;
  config.background = Matrix(16, d);
  for (double& v : config.background.data) v = rng.next_normal();
  config.n_permutations = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(attribution::shapley_sampled(f, x, config));
  }
}
BENCHMARK(BM_ShapleySampled79)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);
