#include "repfreq/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "repfreq/error.hpp"
#include "repfreq/rng.hpp"

#include <json.hpp>

namespace repfreq {

double DiffusionConfig::step_size() const {
  return dt > 0 ? dt : 0.1 / (gain * (n_competing + 1));
}

double DiffusionConfig::noise_sigma() const {
  // Reflection at tau = 0 pushes the rate sum up by roughly
  // sigma^2 (N+1) / (2 a rho mu) at stationarity; this default keeps that
  // inflation near one percent of rho*mu.
  return sigma >= 0 ? sigma : rho * mu * std::sqrt(0.02 * gain / (n_competing + 1));
}

double DiffusionConfig::start_sum() const {
  return initial_sum > 0 ? initial_sum : rho * mu;
}

double DiffusionConfig::lambda_theory() const {
  return (n_competing + 1) / (theta * rho * mu);
}

void DiffusionConfig::validate() const {
  if (n_competing < 2)
    throw ParameterError("diffusion needs at least 2 competing realizations");
  if (!(rho >= 1.0) || !std::isfinite(rho))
    throw ParameterError("parallelism coefficient rho must be >= 1");
  if (!(mu > 0) || !(theta > 0) || !(gain > 0) || !std::isfinite(mu) ||
      !std::isfinite(theta) || !std::isfinite(gain))
    throw ParameterError("mu, theta, and gain must be positive and finite");
  if (sigma >= 0 && !std::isfinite(sigma))
    throw ParameterError("noise sigma must be finite");
  if (burn_in < 0 || n_samples < 1 || sample_stride < 1)
    throw ParameterError("burn_in >= 0, n_samples >= 1, sample_stride >= 1 required");
  const double step = step_size();
  if (!(step > 0) || !std::isfinite(step))
    throw ParameterError("step size must be positive and finite");
  if (gain * (n_competing + 1) * step >= 0.5) {
    std::ostringstream msg;
    msg << "step size violates the stability bound a*(N+1)*dt < 0.5: a=" << gain
        << " N=" << n_competing << " dt=" << step;
    throw NumericError(msg.str());
  }
}

DiffusionResult simulate_diffusion(const DiffusionConfig& cfg) {
  cfg.validate();
  const int m = cfg.n_competing + 1;
  const double dt = cfg.step_size();
  const double noise = cfg.noise_sigma() * std::sqrt(dt);
  const double target = cfg.rho * cfg.mu;
  const double bound = 1e6 * cfg.mu;

  std::vector<double> tau(m, cfg.start_sum() / m);
  double sum = std::accumulate(tau.begin(), tau.end(), 0.0);
  // nudge the first rate so the recomputed sum hits start_sum() exactly;
  // with zero noise the drift then vanishes identically
  for (int fix = 0; fix < 3 && sum != cfg.start_sum(); ++fix) {
    tau[0] += cfg.start_sum() - sum;
    sum = std::accumulate(tau.begin(), tau.end(), 0.0);
  }
  Rng rng(cfg.seed);

  auto step = [&] {
    const double drift = cfg.gain * (target - sum) * dt;
    double next_sum = 0.0;
    if (noise == 0.0) {
      for (double& t : tau) {
        t = std::fabs(t + drift);
        next_sum += t;
      }
    } else {
      for (double& t : tau) {
        t = std::fabs(t + drift + noise * rng.normal());
        if (t > bound) {
          std::ostringstream msg;
          msg << "diffusion unstable: a rate exceeded 1e6*mu; reduce dt (dt="
              << dt << ", a=" << cfg.gain << ")";
          throw NumericError(msg.str());
        }
        next_sum += t;
      }
    }
    sum = next_sum;
  };

  for (std::int64_t i = 0; i < cfg.burn_in; ++i) step();

  DiffusionResult result;
  result.lambda_theory = cfg.lambda_theory();
  result.z_samples.reserve(cfg.n_samples);
  result.sum_rate_trace.reserve(cfg.n_samples);
  for (std::int64_t s = 0; s < cfg.n_samples; ++s) {
    for (std::int64_t j = 0; j < cfg.sample_stride; ++j) step();
    result.z_samples.push_back(cfg.theta * tau[0]);
    result.sum_rate_trace.push_back(sum);
  }
  return result;
}

KsResult ks_exponential(const std::vector<double>& samples, double lambda) {
  if (samples.empty()) throw ParameterError("ks_exponential requires samples");
  if (!(lambda > 0) || !std::isfinite(lambda))
    throw ParameterError("ks_exponential requires lambda > 0");
  std::vector<double> sorted = samples;
  for (double z : sorted)
    if (!(z >= 0) || !std::isfinite(z))
      throw ParameterError("ks_exponential requires nonnegative finite samples");
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double cdf = -std::expm1(-lambda * sorted[i]);
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    ks = std::max(ks, std::max(cdf - lo, hi - cdf));
  }
  return {ks, sorted.size()};
}

double beta_marginal_cdf(double z, const DiffusionConfig& cfg) {
  const double upper = cfg.theta * cfg.rho * cfg.mu;
  if (!(z >= 0) || !(z <= upper)) {
    std::ostringstream msg;
    msg << "z must lie in [0, theta*rho*mu] = [0, " << upper << "], got " << z;
    throw ParameterError(msg.str());
  }
  return -std::expm1(cfg.n_competing * std::log1p(-z / upper));
}

std::string diffusion_result_to_json(const DiffusionResult& result,
                                     double ks_stat, double lambda_empirical,
                                     const std::string& samples_file) {
  nlohmann::ordered_json doc;
  doc["lambda_theory"] = result.lambda_theory;
  doc["lambda_empirical"] = lambda_empirical;
  doc["ks"] = ks_stat;
  doc["n"] = result.z_samples.size();
  doc["samples_file"] = samples_file;
  return doc.dump(2) + "\n";
}

}  // namespace repfreq
