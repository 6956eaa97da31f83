#include <benchmark/benchmark.h>

#include <string>

#include "repfreq/corpus.hpp"

namespace {

std::string synthetic_text(std::size_t target_bytes) {
  static const char* words[] = {"the",   "of",     "said",  "harbor", "wind",
                                "press", "record", "vote",  "copper", "stream",
                                "don't", "well-known", "a",  "b",      "engine"};
  std::string text;
  std::size_t i = 0;
  while (text.size() < target_bytes) {
    text += words[i % (sizeof(words) / sizeof(words[0]))];
    text += (i % 11 == 0) ? ", " : " ";
    ++i;
  }
  return text;
}

void BM_Tokenize(benchmark::State& state) {
  const std::string text = synthetic_text(1 << 20);
  for (auto _ : state) {
    benchmark::DoNotOptimize(repfreq::tokenize(text));
  }
  state.SetBytesProcessed(state.iterations() *
                          static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_Tokenize);

void BM_StripMarkup(benchmark::State& state) {
  std::string html = "<html><head><title>t</title><style>p{}</style></head><body>";
  while (html.size() < (1 << 20))
    html += "<p>Voters lined the <b>harbor</b> &amp; the press gallery.</p>";
  html += "</body></html>";
  for (auto _ : state) {
    benchmark::DoNotOptimize(repfreq::strip_markup(html));
  }
  state.SetBytesProcessed(state.iterations() *
                          static_cast<std::int64_t>(html.size()));
}
BENCHMARK(BM_StripMarkup);

void BM_BuildHistogram(benchmark::State& state) {
  const repfreq::TokenList tokens = repfreq::tokenize(synthetic_text(1 << 20));
  for (auto _ : state) {
    benchmark::DoNotOptimize(repfreq::build_histogram(tokens));
  }
}
BENCHMARK(BM_BuildHistogram);

}  // namespace
