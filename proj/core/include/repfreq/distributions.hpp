#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace repfreq {

/// Pareto second kind (Lomax) component on x >= 0 with survival function
/// S(x) = (b / (x + b))^v, where v is the shape and b the scale.
struct LomaxComponent {
  double shape;  // v > 0
  double scale;  // b > 0

  LomaxComponent(double shape, double scale);
};

double lomax_log_survival(const LomaxComponent& c, double x);
double lomax_survival(const LomaxComponent& c, double x);

/// Discrete law of floor(X) + 1 for Lomax X: p(k) = S(k-1) - S(k) on
/// k = 1, 2, ... Sums to one exactly by telescoping.
double lomax_pmf(const LomaxComponent& c, std::uint64_t k);
double lomax_log_pmf(const LomaxComponent& c, std::uint64_t k);

struct WeightedComponent {
  double weight;  // c_i > 0
  LomaxComponent component;
};

/// Finite Lomax mixture held in canonical order: descending weight, ties by
/// ascending shape then scale. Weights must sum to one within 1e-12.
class Mixture {
public:
  explicit Mixture(std::vector<WeightedComponent> components);

  const std::vector<WeightedComponent>& components() const { return comps_; }
  std::size_t size() const { return comps_.size(); }

  double pmf(std::uint64_t k) const;
  double log_pmf(std::uint64_t k) const;

  /// Mixture survival sum_i c_i S_i(x) on x >= 0.
  double survival(double x) const;

  /// sum_{k >= k_lo} pmf(k) = survival(k_lo - 1), k_lo >= 1.
  double tail_mass(std::uint64_t k_lo) const;

private:
  std::vector<WeightedComponent> comps_;
};

double mixture_pmf(const Mixture& mix, std::uint64_t k);

/// Mean of the mixture when it exists. A component with shape <= 1 has a
/// divergent mean b/(v-1); such components are reported by index instead of
/// producing a number.
struct MixtureMean {
  std::optional<double> value;
  std::vector<std::size_t> divergent_components;

  bool is_finite() const { return value.has_value(); }
};

MixtureMean mixture_mean(const Mixture& mix);

/// Zeta (discrete Pareto-1) law p(k) = k^{-s} / zeta(s), s > 1.
double zipf_pmf(std::uint64_t k, double s);
double zipf_log_pmf(std::uint64_t k, double s);

/// Gamma density for the rate of an exponential occurrence law:
/// phi(r) = rate^shape / Gamma(shape) * r^{shape-1} e^{-rate * r}.
/// Mixing an exponential over this density yields a Lomax with
/// (v, b) = (shape, rate).
struct GammaMixing {
  double shape;
  double rate;

  GammaMixing(double shape, double rate);
};

/// Survival of the compound law at x >= 0, by adaptive quadrature over the
/// mixing density (absolute tolerance 5e-11). Independent of the closed-form
/// Lomax survival.
double compound_survival_numeric(double x, const GammaMixing& mix);

/// Discretized compound pmf p(k) = S(k-1) - S(k) by quadrature; agrees with
/// lomax_pmf(k) for the matching (shape, scale) to better than 1e-9.
double compound_pmf_numeric(std::uint64_t k, const GammaMixing& mix);

/// Draws n occurrence numbers by inversion: component choice by weight, then
/// k = floor(x) + 1 for Lomax x. Deterministic for a given seed, and exactly
/// distributed per mixture pmf.
std::vector<std::uint64_t> sample_mixture(const Mixture& mix, std::size_t n,
                                          std::uint64_t seed);

std::string mixture_to_json(const Mixture& mix);
Mixture mixture_from_json(std::string_view text);

}  // namespace repfreq
