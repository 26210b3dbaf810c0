#include <benchmark/benchmark.h>

#include <vector>

#include "credkit/metrics.hpp"
#include "credkit/rng.hpp"

using namespace credkit;

namespace {

struct Scored {
  std::vector<double> p;
  std::vector<int> y;
};

Scored make_scored(std::size_t n) {
  Rng rng(1, 0);
  Scored s;
  s.p.resize(n);
  s.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.p[i] = rng.next_double();
    s.y[i] = rng.next_bernoulli(0.2) ? 1 : 0;
  }
  s.y[0] = 0;
  s.y[1] = 1;
  return s;
}

}  // namespace

static void BM_Auc(benchmark::State& state) {
  const auto s = make_scored(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(metrics::auc(s.p, s.y));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Auc)->Arg(10000)->Arg(100000);

static void BM_Kendall(benchmark::State& state) {
  Rng rng(2, 0);
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::vector<double> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = rng.next_double();
    b[i] = 0.5 * a[i] + 0.5 * rng.next_double();
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(metrics::kendall(a, b));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Kendall)->Arg(10000)->Arg(100000);

static void BM_PercentileRank(benchmark::State& state) {
  Rng rng(3, 0);
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::vector<double> v(n);
  for (double& x : v) x = rng.next_double();
  for (auto _ : state) {
    benchmark::DoNotOptimize(metrics::percentile_rank(v));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PercentileRank)->Arg(100000);
