#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "repfreq/distributions.hpp"
#include "repfreq/error.hpp"
#include "repfreq/gof.hpp"
#include "repfreq/histogram.hpp"

namespace repfreq {

struct FitOptions {
  int max_iterations = 500;
  double rel_loglik_tolerance = 1e-9;
  int restarts = 5;
  std::uint64_t seed = 0;
  double shape_min = 1e-3;
  double shape_max = 1e3;
  double scale_min = 1e-3;
  double scale_max = 1e6;
  std::uint64_t merge_threshold = 6;
  /// Records the observed-data log-likelihood per EM iteration in the report.
  bool record_trace = false;
};

enum class ModelKind { zipf, mixture };

struct FitReport {
  ModelKind model = ModelKind::mixture;
  double zipf_exponent = 0.0;             // set when model == zipf
  std::optional<Mixture> mixture;         // set when model == mixture
  double log_likelihood = 0.0;
  double chi2 = 0.0;
  int dof = 0;
  double p_value = 0.0;
  BinLayout layout;
  std::vector<double> e_lambda;           // v_i / b_i per component
  std::uint64_t sample_types = 0;
  int iterations = 0;
  bool converged = true;
  std::vector<double> loglik_trace;       // filled when FitOptions::record_trace

  int n_free_params() const;
};

/// Thrown when no restart reaches the relative log-likelihood tolerance.
/// Carries the best report found so it can still be inspected or written.
class FitDidNotConverge : public ConvergenceError {
public:
  FitDidNotConverge(const std::string& what, FitReport best_report)
      : ConvergenceError(what), best(std::move(best_report)) {}
  FitReport best;
};

/// Maximum-likelihood zeta fit: the exponent solves the score equation
/// E_s[ln K] = mean observed ln k on s in (1, 50], by safeguarded
/// Newton/bisection to |ds| < 1e-8. Needs at least two distinct k values.
FitReport fit_zipf(const FrequencyHistogram& hist, const FitOptions& opts = {});

/// Weighted EM over histogram bins for an M-component Lomax mixture.
/// E-step responsibilities per bin; M-step closed-form weights plus a bounded
/// Nelder-Mead search for each component in (ln v, ln b). Best of
/// FitOptions::restarts seeded initializations wins.
FitReport fit_mixture(const FrequencyHistogram& hist, int M,
                      const FitOptions& opts = {});

struct ModelSelection {
  struct Entry {
    int M = 0;
    std::optional<FitReport> report;
    std::string error;
  };

  std::optional<FitReport> zipf;
  std::string zipf_error;
  std::vector<Entry> mixtures;
  int selected_M = 0;
  double alpha = 0.0;
  /// True when no M reached p >= alpha and the argmax-p model was taken.
  bool by_fallback = false;

  const FitReport& selected() const;
};

/// Fits the zeta baseline and mixtures M = 1..max_M, then selects the
/// smallest M with p >= alpha (or flags the argmax-p fallback). Per-M
/// failures are recorded without aborting the other fits.
ModelSelection select_model(const FrequencyHistogram& hist, int max_M,
                            double alpha, const FitOptions& opts = {});

std::string report_to_json(const FitReport& report);
FitReport report_from_json(std::string_view text);
std::string selection_to_json(const ModelSelection& sel);
ModelSelection selection_from_json(std::string_view text);

}  // namespace repfreq
