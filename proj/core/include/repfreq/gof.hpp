#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "repfreq/distributions.hpp"
#include "repfreq/histogram.hpp"

namespace repfreq {

/// A discrete model on k = 1, 2, ... as seen by the chi-square machinery.
class CountModel {
public:
  virtual ~CountModel() = default;
  virtual double pmf(std::uint64_t k) const = 0;
  /// sum_{k >= k_lo} pmf(k)
  virtual double tail_mass(std::uint64_t k_lo) const = 0;
};

class MixtureModel final : public CountModel {
public:
  explicit MixtureModel(Mixture mix) : mix_(std::move(mix)) {}
  double pmf(std::uint64_t k) const override { return mix_.pmf(k); }
  double tail_mass(std::uint64_t k_lo) const override { return mix_.tail_mass(k_lo); }
  const Mixture& mixture() const { return mix_; }

private:
  Mixture mix_;
};

class ZipfModel final : public CountModel {
public:
  explicit ZipfModel(double s);
  double pmf(std::uint64_t k) const override;
  double tail_mass(std::uint64_t k_lo) const override;
  double exponent() const { return s_; }

private:
  double s_;
  double zeta_;
};

struct Bin {
  std::uint64_t k_lo;
  std::uint64_t k_hi;
  std::uint64_t observed;
  double expected;
};

/// Contiguous bins covering min-k..max-k of a histogram. All bins hold at
/// least the merge threshold of observed types, except possibly the first.
struct BinLayout {
  std::vector<Bin> bins;
};

/// Merges sparse right-tail bins: walking from the largest observed k to the
/// left, raw bins accumulate until the observed count reaches the threshold.
/// A leftover accumulation below the threshold joins its right neighbour when
/// one exists. Expected counts come from tail-mass differences; the topmost
/// bin absorbs the model mass above the largest observed k and the lowest bin
/// the mass below the smallest, so expected counts partition total_types.
BinLayout merge_bins(const FrequencyHistogram& hist, const CountModel& model,
                     std::uint64_t threshold = 6);

struct Chi2Result {
  double chi2;
  int dof;
  double p_value;
};

/// Pearson chi-square over the merged layout with dof = bins - 1 - n_free.
/// Throws ParameterError when the layout has too few bins for the dof.
Chi2Result chi_square(const BinLayout& layout, int n_free_params);
Chi2Result chi_square(const FrequencyHistogram& hist, const CountModel& model,
                      int n_free_params, std::uint64_t threshold = 6);

/// Upper-tail chi-square probability Q(dof/2, x/2).
double chi2_sf(double x, int dof);

}  // namespace repfreq
