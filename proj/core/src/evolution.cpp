#include "repfreq/evolution.hpp"

#include <cmath>

#include "repfreq/error.hpp"

#include <json.hpp>

namespace repfreq {

double price_delta(double z_fr, double zbar, double delta_zfr) {
  if (!std::isfinite(z_fr) || !std::isfinite(zbar) || !std::isfinite(delta_zfr))
    throw ParameterError("price_delta requires finite inputs");
  return z_fr - zbar + delta_zfr;
}

EvolutionAssessment assess_model(const Mixture& mix, double z_fr,
                                 double delta_zfr) {
  if (!std::isfinite(z_fr) || !std::isfinite(delta_zfr))
    throw ParameterError("assess_model requires finite z_fr and delta_zfr");
  EvolutionAssessment out;
  out.z_fr = z_fr;
  out.delta_zfr = delta_zfr;
  const MixtureMean mean = mixture_mean(mix);
  out.divergent_components = mean.divergent_components;
  if (mean.is_finite()) {
    out.zbar = *mean.value;
    out.delta_zbar = price_delta(z_fr, *mean.value, delta_zfr);
  }
  return out;
}

std::string assessment_to_json(const EvolutionAssessment& a) {
  nlohmann::ordered_json doc;
  doc["z_fr"] = a.z_fr;
  doc["delta_zfr"] = a.delta_zfr;
  if (a.zbar) {
    doc["zbar"] = *a.zbar;
    doc["delta_zbar"] = *a.delta_zbar;
  } else {
    doc["zbar"] = "divergent";
    doc["delta_zbar"] = "divergent";
    doc["divergent_components"] = a.divergent_components;
  }
  return doc.dump(2) + "\n";
}

}  // namespace repfreq
