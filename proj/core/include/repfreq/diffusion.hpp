#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace repfreq {

/// Parameters of the competing-rates diffusion
///   d tau_i = a (rho mu - sum_j tau_j) dt + sigma dW_i,  i = 0..N,
/// integrated by Euler-Maruyama with a reflecting boundary at tau_i = 0.
/// The observable is z = theta * tau_0.
struct DiffusionConfig {
  int n_competing = 100;        // N; the system holds N + 1 rates
  double rho = 1.0;             // parallelism coefficient, >= 1
  double mu = 1.0;              // macrostate rate
  double theta = 1.0;           // observation time
  double gain = 1.0;            // drift gain a
  double sigma = -1.0;          // noise intensity; negative selects the default
  double dt = -1.0;             // step size; negative selects 0.1 / (a (N+1))
  std::int64_t burn_in = 10000;
  std::int64_t n_samples = 10000;
  std::int64_t sample_stride = 1500;
  std::uint64_t seed = 0;
  double initial_sum = -1.0;    // starting sum of rates; negative means rho*mu

  /// Resolved step size; must satisfy a (N+1) dt < 0.5.
  double step_size() const;
  /// Resolved noise intensity. The default keeps the reflection-induced
  /// inflation of the rate sum near one percent of rho*mu.
  double noise_sigma() const;
  double start_sum() const;

  /// (N+1) / (theta rho mu): the exponential rate the stationary marginal
  /// of z approaches for large N.
  double lambda_theory() const;

  /// Throws ParameterError for out-of-domain fields and NumericError when
  /// the step size violates the stability bound.
  void validate() const;
};

struct DiffusionResult {
  std::vector<double> z_samples;
  double lambda_theory = 0.0;
  std::vector<double> sum_rate_trace;  // sum_j tau_j at each sample instant
};

/// Runs the diffusion, discarding burn_in steps and then recording
/// z = theta * tau_0 every sample_stride steps. Deterministic per seed.
/// Throws NumericError if any rate exceeds 1e6 * mu.
DiffusionResult simulate_diffusion(const DiffusionConfig& cfg);

struct KsResult {
  double ks_stat;
  std::size_t n;
};

/// Two-sided Kolmogorov-Smirnov distance between the samples and an
/// Exponential(lambda) law.
KsResult ks_exponential(const std::vector<double>& samples, double lambda);

/// Exact finite-N stationary marginal of z on the rate simplex:
/// F(z) = 1 - (1 - z / (theta rho mu))^N, for z in [0, theta rho mu].
double beta_marginal_cdf(double z, const DiffusionConfig& cfg);

std::string diffusion_result_to_json(const DiffusionResult& result,
                                     double ks_stat, double lambda_empirical,
                                     const std::string& samples_file);

}  // namespace repfreq
