#include <benchmark/benchmark.h>

#include "credkit/gbt.hpp"
#include "credkit/mlp.hpp"
#include "credkit/rng.hpp"
#include "credkit/synthetic.hpp"

using namespace credkit;

namespace {

struct TrainData {
  Matrix x;
  std::vector<int> y;
};

TrainData make_training_data(std::size_t n, std::size_t d) {
  Rng rng(7, 0);
  TrainData td;
  td.x = Matrix(n, d);
  td.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double signal = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      td.x.at(i, j) = rng.next_normal();
      if (j % 7 == 0) signal += td.x.at(i, j);
    }
    td.y[i] = rng.next_bernoulli(1.0 / (1.0 + std::exp(-signal))) ? 1 : 0;
  }
  td.y[0] = 0;
  td.y[1] = 1;
  return td;
}

}  // namespace

static void BM_FitGbt(benchmark::State& state) {
  const auto td = make_training_data(static_cast<std::size_t>(state.range(0)), 79);
  model::GbtConfig config;
  config.n_trees = 25;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model::fit_gbt(td.x, td.y, config));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FitGbt)->Arg(5000)->Unit(benchmark::kMillisecond);

static void BM_FitMlp(benchmark::State& state) {
  const auto td = make_training_data(static_cast<std::size_t>(state.range(0)), 79);
  model::MlpConfig config;
  config.epochs = 3;
  config.seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model::fit_mlp(td.x, td.y, config));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FitMlp)->Arg(5000)->Unit(benchmark::kMillisecond);

static void BM_GenerateSyntheticPanel(benchmark::State& state) {
  panel::GenConfig config;
  config.n_consumers = static_cast<std::size_t>(state.range(0));
  config.n_quarters = 12;
  for (auto _ : state) {
    benchmark::DoNotOptimize(panel::generate_synthetic(config, 5));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 12);
}
BENCHMARK(BM_GenerateSyntheticPanel)->Arg(5000)->Unit(benchmark::kMillisecond);
