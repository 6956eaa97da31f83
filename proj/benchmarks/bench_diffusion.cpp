#include <benchmark/benchmark.h>

#include "repfreq/diffusion.hpp"

namespace {

void BM_DiffusionSteps(benchmark::State& state) {
  repfreq::DiffusionConfig cfg;
  cfg.n_competing = static_cast<int>(state.range(0));
  cfg.burn_in = 0;
  cfg.n_samples = 100;
  cfg.sample_stride = 100;
  cfg.seed = 99;
  for (auto _ : state) {
    benchmark::DoNotOptimize(repfreq::simulate_diffusion(cfg));
  }
  state.SetItemsProcessed(state.iterations() * 10000 *
                          (state.range(0) + 1));
}
BENCHMARK(BM_DiffusionSteps)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace
