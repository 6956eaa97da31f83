#include <benchmark/benchmark.h>

#include <map>

#include "repfreq/distributions.hpp"
#include "repfreq/fitting.hpp"
#include "repfreq/histogram.hpp"

namespace {

repfreq::FrequencyHistogram synthetic_histogram(std::size_t n) {
  const repfreq::Mixture mix({{0.55, repfreq::LomaxComponent(1.19, 2.08)},
                              {0.45, repfreq::LomaxComponent(0.89, 7.26)}});
  std::map<std::uint64_t, std::uint64_t> bins;
  for (std::uint64_t k : repfreq::sample_mixture(mix, n, 7)) ++bins[k];
  return repfreq::FrequencyHistogram::from_bins(std::move(bins));
}

void BM_FitZipf(benchmark::State& state) {
  const repfreq::FrequencyHistogram hist = synthetic_histogram(100000);
  for (auto _ : state) {
    benchmark::DoNotOptimize(repfreq::fit_zipf(hist));
  }
}
BENCHMARK(BM_FitZipf);

void BM_FitMixtureM2(benchmark::State& state) {
  const repfreq::FrequencyHistogram hist = synthetic_histogram(100000);
  repfreq::FitOptions opts;
  opts.restarts = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(repfreq::fit_mixture(hist, 2, opts));
  }
}
BENCHMARK(BM_FitMixtureM2)->Unit(benchmark::kMillisecond);

}  // namespace
