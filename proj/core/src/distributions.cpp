#include "repfreq/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "repfreq/error.hpp"
#include "repfreq/numerics.hpp"
#include "repfreq/rng.hpp"

#include <json.hpp>

namespace repfreq {

namespace {

void require_positive_k(std::uint64_t k) {
  if (k < 1) throw ParameterError("occurrence number k must be >= 1");
}

void require_x(double x) {
  if (!(x >= 0) || !std::isfinite(x))
    throw ParameterError("x must be finite and >= 0");
}

}  // namespace

LomaxComponent::LomaxComponent(double shape_in, double scale_in)
    : shape(shape_in), scale(scale_in) {
  if (!std::isfinite(shape) || !std::isfinite(scale) || shape <= 0 || scale <= 0) {
    std::ostringstream msg;
    msg << "Lomax parameters must be positive and finite: v=" << shape_in
        << " b=" << scale_in;
    throw ParameterError(msg.str());
  }
}

double lomax_log_survival(const LomaxComponent& c, double x) {
  require_x(x);
  return -c.shape * std::log1p(x / c.scale);
}

double lomax_survival(const LomaxComponent& c, double x) {
  return std::exp(lomax_log_survival(c, x));
}

double lomax_log_pmf(const LomaxComponent& c, std::uint64_t k) {
  require_positive_k(k);
  const double x = static_cast<double>(k - 1);
  // p(k) = S(k-1) * (1 - ((k-1+b)/(k+b))^v), both factors evaluated stably.
  const double step = -std::expm1(-c.shape * std::log1p(1.0 / (x + c.scale)));
  return lomax_log_survival(c, x) + std::log(step);
}

double lomax_pmf(const LomaxComponent& c, std::uint64_t k) {
  return std::exp(lomax_log_pmf(c, k));
}

Mixture::Mixture(std::vector<WeightedComponent> components)
    : comps_(std::move(components)) {
  if (comps_.empty())
    throw ParameterError("mixture needs at least one component");
  double sum = 0.0;
  for (const auto& wc : comps_) {
    if (!std::isfinite(wc.weight) || wc.weight <= 0)
      throw ParameterError("mixture weights must be positive and finite");
    sum += wc.weight;
  }
  if (std::fabs(sum - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg << "mixture weights must sum to 1 (got " << sum << ")";
    throw ParameterError(msg.str());
  }
  std::sort(comps_.begin(), comps_.end(),
            [](const WeightedComponent& a, const WeightedComponent& b) {
              if (a.weight != b.weight) return a.weight > b.weight;
              if (a.component.shape != b.component.shape)
                return a.component.shape < b.component.shape;
              return a.component.scale < b.component.scale;
            });
}

double Mixture::pmf(std::uint64_t k) const {
  double total = 0.0;
  for (const auto& wc : comps_) total += wc.weight * lomax_pmf(wc.component, k);
  return total;
}

double Mixture::log_pmf(std::uint64_t k) const {
  double best = -std::numeric_limits<double>::infinity();
  double lp[16];
  const std::size_t m = comps_.size();
  if (m > 16) return std::log(pmf(k));
  for (std::size_t i = 0; i < m; ++i) {
    lp[i] = std::log(comps_[i].weight) + lomax_log_pmf(comps_[i].component, k);
    best = std::max(best, lp[i]);
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) acc += std::exp(lp[i] - best);
  return best + std::log(acc);
}

double Mixture::survival(double x) const {
  double total = 0.0;
  for (const auto& wc : comps_) total += wc.weight * lomax_survival(wc.component, x);
  return total;
}

double Mixture::tail_mass(std::uint64_t k_lo) const {
  require_positive_k(k_lo);
  return survival(static_cast<double>(k_lo - 1));
}

double mixture_pmf(const Mixture& mix, std::uint64_t k) { return mix.pmf(k); }

MixtureMean mixture_mean(const Mixture& mix) {
  MixtureMean result;
  for (std::size_t i = 0; i < mix.size(); ++i) {
    if (mix.components()[i].component.shape <= 1.0)
      result.divergent_components.push_back(i);
  }
  if (!result.divergent_components.empty()) return result;
  double mean = 0.0;
  for (const auto& wc : mix.components())
    mean += wc.weight * wc.component.scale / (wc.component.shape - 1.0);
  result.value = mean;
  return result;
}

double zipf_log_pmf(std::uint64_t k, double s) {
  require_positive_k(k);
  // riemann_zeta validates s > 1
  return -s * std::log(static_cast<double>(k)) - std::log(riemann_zeta(s));
}

double zipf_pmf(std::uint64_t k, double s) {
  return std::exp(zipf_log_pmf(k, s));
}

GammaMixing::GammaMixing(double shape_in, double rate_in)
    : shape(shape_in), rate(rate_in) {
  if (!std::isfinite(shape) || !std::isfinite(rate) || shape <= 0 || rate <= 0) {
    std::ostringstream msg;
    msg << "Gamma mixing parameters must be positive and finite: shape=" << shape_in
        << " rate=" << rate_in;
    throw ParameterError(msg.str());
  }
}

double compound_survival_numeric(double x, const GammaMixing& mix) {
  require_x(x);
  const double v = mix.shape;
  const double b = mix.rate;
  // S(x) = int_0^inf phi(r) e^{-r x} dr over t = ln r. The integrand
  // exp(v t - (b + x) e^t) peaks at t* = ln(v / (b + x)) and decays like
  // e^{v t} to the left and doubly exponentially to the right.
  const double log_norm = v * std::log(b) - std::lgamma(v);
  const double t_star = std::log(v / (b + x));
  const double lo = t_star - 5.0 - 60.0 / v;
  const double hi = t_star + 6.0;
  auto integrand = [&](double t) {
    return std::exp(log_norm + v * t - (b + x) * std::exp(t));
  };
  // Split around the peak so the initial rule cannot step over it: the
  // integrand has width ~ 1/sqrt(v) in t, which is far narrower than the
  // window for large shapes.
  const double width = std::min(3.0, 8.0 / std::sqrt(v));
  const double cut_lo = std::max(lo, t_star - width);
  const double cut_hi = std::min(hi, t_star + width);
  return integrate_adaptive(integrand, lo, cut_lo, 1e-11) +
         integrate_adaptive(integrand, cut_lo, cut_hi, 3e-11) +
         integrate_adaptive(integrand, cut_hi, hi, 1e-11);
}

double compound_pmf_numeric(std::uint64_t k, const GammaMixing& mix) {
  require_positive_k(k);
  const double x = static_cast<double>(k - 1);
  return compound_survival_numeric(x, mix) - compound_survival_numeric(x + 1.0, mix);
}

std::vector<std::uint64_t> sample_mixture(const Mixture& mix, std::size_t n,
                                          std::uint64_t seed) {
  if (n < 1) throw ParameterError("sample count must be >= 1");
  Rng rng(seed);
  std::vector<std::uint64_t> out;
  out.reserve(n);
  const auto& comps = mix.components();
  for (std::size_t i = 0; i < n; ++i) {
    double u = rng.uniform01();
    std::size_t pick = comps.size() - 1;
    double acc = 0.0;
    for (std::size_t j = 0; j < comps.size(); ++j) {
      acc += comps[j].weight;
      if (u < acc) {
        pick = j;
        break;
      }
    }
    const auto& c = comps[pick].component;
    // Inverse transform: x = b ((1-u)^(-1/v) - 1), then k = floor(x) + 1.
    const double w = -std::log1p(-rng.uniform01()) / c.shape;
    const double x = c.scale * std::expm1(w);
    out.push_back(x >= 9.0e18 ? static_cast<std::uint64_t>(9.0e18)
                              : static_cast<std::uint64_t>(x) + 1);
  }
  return out;
}

std::string mixture_to_json(const Mixture& mix) {
  nlohmann::ordered_json components = nlohmann::ordered_json::array();
  for (const auto& wc : mix.components()) {
    components.push_back({{"c", wc.weight},
                          {"v", wc.component.shape},
                          {"b", wc.component.scale}});
  }
  nlohmann::ordered_json doc;
  doc["components"] = std::move(components);
  return doc.dump(2) + "\n";
}

Mixture mixture_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("invalid mixture JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("components") || !doc["components"].is_array())
    throw InputError("mixture JSON must contain a \"components\" array");
  std::vector<WeightedComponent> comps;
  try {
    for (const auto& item : doc["components"]) {
      comps.push_back(WeightedComponent{
          item.at("c").get<double>(),
          LomaxComponent(item.at("v").get<double>(), item.at("b").get<double>())});
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("invalid mixture JSON: ") + e.what());
  }
  return Mixture(std::move(comps));
}

}  // namespace repfreq
