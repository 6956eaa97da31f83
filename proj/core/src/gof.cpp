#include "repfreq/gof.hpp"

#include <cmath>
#include <sstream>

#include "repfreq/error.hpp"
#include "repfreq/numerics.hpp"

namespace repfreq {

ZipfModel::ZipfModel(double s) : s_(s), zeta_(riemann_zeta(s)) {}

double ZipfModel::pmf(std::uint64_t k) const {
  if (k < 1) throw ParameterError("occurrence number k must be >= 1");
  return std::exp(-s_ * std::log(static_cast<double>(k))) / zeta_;
}

double ZipfModel::tail_mass(std::uint64_t k_lo) const {
  return riemann_zeta_tail(s_, k_lo) / zeta_;
}

BinLayout merge_bins(const FrequencyHistogram& hist, const CountModel& model,
                     std::uint64_t threshold) {
  hist.validate();
  if (threshold < 1) throw ParameterError("merge threshold must be >= 1");

  // Accumulate raw bins right to left until a bin holds `threshold` types.
  // `bound` is the upper k edge of the bin being accumulated; it extends to
  // just below the previously emitted bin so the layout stays contiguous.
  std::vector<Bin> reversed;
  std::uint64_t acc = 0;
  std::uint64_t bound = 0;
  bool open = false;
  for (auto it = hist.bins.rbegin(); it != hist.bins.rend(); ++it) {
    if (!open) {
      bound = reversed.empty() ? it->first : reversed.back().k_lo - 1;
      open = true;
      acc = 0;
    }
    acc += it->second;
    if (acc >= threshold) {
      reversed.push_back(Bin{it->first, bound, acc, 0.0});
      open = false;
    }
  }
  if (open) {
    // Leftover low-k accumulation below the threshold.
    if (!reversed.empty()) {
      reversed.back().k_lo = hist.min_k();
      reversed.back().observed += acc;
    } else {
      reversed.push_back(Bin{hist.min_k(), bound, acc, 0.0});
    }
  }

  BinLayout layout;
  layout.bins.assign(reversed.rbegin(), reversed.rend());

  // Expected counts from tail-mass differences. The boundary masses are
  // evaluated once and reused so the expected counts telescope to exactly
  // total_types: the lowest bin absorbs model mass below min k and the
  // topmost bin the mass above max k.
  const double total = static_cast<double>(hist.total_types);
  const std::size_t n_bins = layout.bins.size();
  std::vector<double> boundary(n_bins + 1);
  boundary[0] = 1.0;
  for (std::size_t i = 1; i < n_bins; ++i)
    boundary[i] = model.tail_mass(layout.bins[i].k_lo);
  boundary[n_bins] = 0.0;
  for (std::size_t i = 0; i < n_bins; ++i)
    layout.bins[i].expected = total * (boundary[i] - boundary[i + 1]);
  return layout;
}

Chi2Result chi_square(const BinLayout& layout, int n_free_params) {
  if (n_free_params < 0) throw ParameterError("n_free_params must be >= 0");
  const int n_bins = static_cast<int>(layout.bins.size());
  if (n_bins <= n_free_params + 1) {
    std::ostringstream msg;
    msg << "insufficient bins for dof: " << n_bins << " bins, "
        << n_free_params << " free parameters";
    throw ParameterError(msg.str());
  }
  KahanSum sum;
  for (const Bin& bin : layout.bins) {
    const double diff = static_cast<double>(bin.observed) - bin.expected;
    sum.add(diff * diff / bin.expected);
  }
  const double chi2 = sum.value();
  const int dof = n_bins - 1 - n_free_params;
  return {chi2, dof, chi2_sf(chi2, dof)};
}

Chi2Result chi_square(const FrequencyHistogram& hist, const CountModel& model,
                      int n_free_params, std::uint64_t threshold) {
  return chi_square(merge_bins(hist, model, threshold), n_free_params);
}

double chi2_sf(double x, int dof) {
  if (std::isnan(x) || x < 0)
    throw ParameterError("chi2_sf requires x >= 0");
  if (dof < 1) throw ParameterError("chi2_sf requires dof >= 1");
  return regularized_gamma_q(0.5 * dof, 0.5 * x);
}

}  // namespace repfreq
