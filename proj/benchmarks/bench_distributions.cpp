#include <benchmark/benchmark.h>

#include "repfreq/distributions.hpp"

namespace {

repfreq::Mixture two_component_mixture() {
  return repfreq::Mixture({{0.55, repfreq::LomaxComponent(1.19, 2.08)},
                           {0.45, repfreq::LomaxComponent(0.89, 7.26)}});
}

void BM_MixtureLogPmf(benchmark::State& state) {
  const repfreq::Mixture mix = two_component_mixture();
  std::uint64_t k = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mix.log_pmf(k));
    k = k % 10000 + 1;
  }
}
BENCHMARK(BM_MixtureLogPmf);

void BM_MixtureSurvival(benchmark::State& state) {
  const repfreq::Mixture mix = two_component_mixture();
  double x = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mix.survival(x));
    x = x < 1e6 ? x + 17.0 : 0.0;
  }
}
BENCHMARK(BM_MixtureSurvival);

void BM_SampleMixture(benchmark::State& state) {
  const repfreq::Mixture mix = two_component_mixture();
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(repfreq::sample_mixture(mix, n, 42));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_SampleMixture)->Arg(100000);

void BM_CompoundPmfNumeric(benchmark::State& state) {
  const repfreq::GammaMixing mix(1.19, 2.08);
  std::uint64_t k = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(repfreq::compound_pmf_numeric(k, mix));
    k = k % 100 + 1;
  }
}
BENCHMARK(BM_CompoundPmfNumeric);

}  // namespace
