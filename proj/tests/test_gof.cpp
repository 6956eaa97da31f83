#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "repfreq/error.hpp"
#include "repfreq/gof.hpp"

using namespace repfreq;

namespace {

Mixture cbs_like() {
  return Mixture({{0.55, LomaxComponent(1.19, 2.08)},
                  {0.45, LomaxComponent(0.89, 7.26)}});
}

}  // namespace

TEST_CASE("merge_bins applies the right-tail rule") {
  // raw observed by k: [100, 40, 10, 3, 2] -> [{1}, {2}, {3..5}]
  const FrequencyHistogram hist = FrequencyHistogram::from_bins(
      {{1, 100}, {2, 40}, {3, 10}, {4, 3}, {5, 2}});
  const BinLayout layout = merge_bins(hist, MixtureModel(cbs_like()), 6);
  REQUIRE(layout.bins.size() == 3);
  CHECK(layout.bins[0].k_lo == 1);
  CHECK(layout.bins[0].k_hi == 1);
  CHECK(layout.bins[0].observed == 100);
  CHECK(layout.bins[1].k_lo == 2);
  CHECK(layout.bins[1].k_hi == 2);
  CHECK(layout.bins[1].observed == 40);
  CHECK(layout.bins[2].k_lo == 3);
  CHECK(layout.bins[2].k_hi == 5);
  CHECK(layout.bins[2].observed == 15);
}

TEST_CASE("merge_bins is a no-op when every raw bin is full") {
  const FrequencyHistogram hist =
      FrequencyHistogram::from_bins({{1, 10}, {2, 8}, {3, 6}});
  const BinLayout layout = merge_bins(hist, MixtureModel(cbs_like()), 6);
  REQUIRE(layout.bins.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(layout.bins[i].k_lo == i + 1);
    CHECK(layout.bins[i].k_hi == i + 1);
  }
}

TEST_CASE("merge_bins handles single-bin and leftover cases") {
  const FrequencyHistogram single = FrequencyHistogram::from_bins({{4, 3}});
  const BinLayout one = merge_bins(single, MixtureModel(cbs_like()), 6);
  REQUIRE(one.bins.size() == 1);
  CHECK(one.bins[0].k_lo == 4);
  CHECK(one.bins[0].k_hi == 4);
  CHECK(one.bins[0].observed == 3);

  // a low-k leftover below the threshold joins its right neighbour
  const FrequencyHistogram leftover =
      FrequencyHistogram::from_bins({{1, 2}, {2, 40}, {3, 10}});
  const BinLayout merged = merge_bins(leftover, MixtureModel(cbs_like()), 6);
  REQUIRE(merged.bins.size() == 2);
  CHECK(merged.bins[0].k_lo == 1);
  CHECK(merged.bins[0].k_hi == 2);
  CHECK(merged.bins[0].observed == 42);
  CHECK(merged.bins[1].k_lo == 3);
  CHECK(merged.bins[1].k_hi == 3);
}

TEST_CASE("merged layout is contiguous and conserves totals") {
  const FrequencyHistogram hist = FrequencyHistogram::from_bins(
      {{1, 500}, {2, 120}, {3, 40}, {5, 9}, {8, 3}, {9, 2}, {40, 1}, {41, 1},
       {100, 1}});
  const MixtureModel mixture_model(cbs_like());
  const ZipfModel zipf_model(1.8);
  for (const CountModel* model :
       std::initializer_list<const CountModel*>{&mixture_model, &zipf_model}) {
    const BinLayout layout = merge_bins(hist, *model, 6);
    std::uint64_t observed = 0;
    double expected = 0.0;
    for (std::size_t i = 0; i < layout.bins.size(); ++i) {
      observed += layout.bins[i].observed;
      expected += layout.bins[i].expected;
      CHECK(layout.bins[i].k_lo <= layout.bins[i].k_hi);
      if (i > 0) CHECK(layout.bins[i].k_lo == layout.bins[i - 1].k_hi + 1);
    }
    CHECK(layout.bins.front().k_lo == hist.min_k());
    CHECK(layout.bins.back().k_hi == hist.max_k());
    CHECK(observed == hist.total_types);
    CHECK(expected ==
          doctest::Approx(static_cast<double>(hist.total_types)).epsilon(1e-12));
  }
}

TEST_CASE("chi_square closed cases") {
  // observed identical to expected gives chi2 = 0, p = 1
  BinLayout layout;
  layout.bins = {{1, 1, 50, 50.0}, {2, 2, 30, 30.0}, {3, 5, 20, 20.0},
                 {6, 9, 10, 10.0}};
  const Chi2Result exact = chi_square(layout, 1);
  CHECK(exact.chi2 == 0.0);
  CHECK(exact.dof == 2);
  CHECK(exact.p_value == 1.0);

  CHECK_THROWS_AS(chi_square(layout, 3), ParameterError);
  CHECK_THROWS_AS(chi_square(layout, -1), ParameterError);
}

TEST_CASE("chi_square is insensitive to bin construction order") {
  // same multiset of raw bins inserted in different orders
  std::map<std::uint64_t, std::uint64_t> a, b;
  const std::pair<std::uint64_t, std::uint64_t> raw[] = {
      {1, 90}, {2, 30}, {3, 9}, {4, 4}, {5, 2}};
  for (const auto& [k, n] : raw) a[k] = n;
  for (auto it = std::rbegin(raw); it != std::rend(raw); ++it) b[it->first] = it->second;
  const FrequencyHistogram ha = FrequencyHistogram::from_bins(a);
  const FrequencyHistogram hb = FrequencyHistogram::from_bins(b);
  const MixtureModel model(cbs_like());
  const Chi2Result ra = chi_square(ha, model, 2);
  const Chi2Result rb = chi_square(hb, model, 2);
  CHECK(ra.chi2 == rb.chi2);
  CHECK(ra.dof == rb.dof);
  CHECK(ra.p_value == rb.p_value);
}

TEST_CASE("chi2_sf closed forms and frozen percentile") {
  CHECK(chi2_sf(0.0, 1) == 1.0);
  CHECK(chi2_sf(0.0, 7) == 1.0);
  CHECK(chi2_sf(2.0, 2) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  for (double x : {0.5, 1.0, 3.0, 10.0})
    CHECK(chi2_sf(x, 2) == doctest::Approx(std::exp(-x / 2)).epsilon(1e-12));
  // frozen high-precision value of Q(1/2, 3.841/2)
  CHECK(chi2_sf(3.841, 1) == doctest::Approx(0.0500136837639567).epsilon(1e-10));
  CHECK(chi2_sf(std::numeric_limits<double>::infinity(), 3) == 0.0);
  CHECK_THROWS_AS(chi2_sf(-1.0, 2), ParameterError);
  CHECK_THROWS_AS(chi2_sf(1.0, 0), ParameterError);
}

TEST_CASE("chi2_sf is strictly decreasing in x") {
  // strictly once below the double-precision plateau at 1
  for (int dof : {1, 2, 5, 40}) {
    double prev = 1.0;
    for (double x = 0.5; x < 80.0; x += 0.5) {
      const double p = chi2_sf(x, dof);
      REQUIRE(p <= prev);
      if (prev < 1.0 - 1e-15) REQUIRE(p < prev);
      prev = p;
    }
    REQUIRE(prev < 1e-3);
  }
}
