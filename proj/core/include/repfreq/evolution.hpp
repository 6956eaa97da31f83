#pragma once

#include <optional>
#include <string>
#include <vector>

#include "repfreq/distributions.hpp"

namespace repfreq {

/// Price reduced-equation assessment of a representation medium. The rate of
/// change of the mean frequency decomposes as
///   delta_zbar = z_fr - zbar + delta_zfr,
/// where z_fr is the selection threshold frequency, zbar the mean
/// representation frequency under the fitted model and delta_zfr the
/// selection error. A mixture with a divergent mean yields no number; the
/// offending components are listed instead.
struct EvolutionAssessment {
  double z_fr = 0.0;
  double delta_zfr = 0.0;
  std::optional<double> zbar;
  std::optional<double> delta_zbar;
  std::vector<std::size_t> divergent_components;

  bool divergent() const { return !zbar.has_value(); }
};

/// z_fr - zbar + delta_zfr. Throws ParameterError on non-finite input.
double price_delta(double z_fr, double zbar, double delta_zfr);

EvolutionAssessment assess_model(const Mixture& mix, double z_fr,
                                 double delta_zfr);

std::string assessment_to_json(const EvolutionAssessment& a);

}  // namespace repfreq
