#include "qla/security_impact.hpp"

#include <cmath>
#include <stdexcept>

namespace qla {

const char* to_string(ImpactClass c) {
  switch (c) {
    case ImpactClass::Compromised: return "Compromised";
    case ImpactClass::DenialOfService: return "DenialOfService";
    case ImpactClass::Unaffected: return "Unaffected";
  }
  return "Unknown";
}

double mpn_ratio(double delta_attenuation_db) {
  if (!std::isfinite(delta_attenuation_db)) {
    throw std::invalid_argument("mpn_ratio: attenuation change must be finite");
  }
  return std::pow(10.0, -delta_attenuation_db / 10.0);
}

double adjusted_mu(double mu0, double delta_attenuation_db) {
  if (!(mu0 > 0.0) || !std::isfinite(mu0)) {
    throw std::invalid_argument("adjusted_mu: mean photon number must be > 0");
  }
  return mu0 * mpn_ratio(delta_attenuation_db);
}

ImpactClass classify(double delta_attenuation_db, double success_threshold_db,
                     double failure_threshold_db) {
  if (!(success_threshold_db < 0.0 && 0.0 < failure_threshold_db)) {
    throw std::invalid_argument("classify: need success threshold < 0 < failure threshold");
  }
  if (delta_attenuation_db <= success_threshold_db) return ImpactClass::Compromised;
  if (delta_attenuation_db >= failure_threshold_db) return ImpactClass::DenialOfService;
  return ImpactClass::Unaffected;
}

ImpactReport make_impact_report(double delta_attenuation_db, double mu0,
                                double success_threshold_db, double failure_threshold_db) {
  const double ratio = mpn_ratio(delta_attenuation_db);
  return {delta_attenuation_db, ratio, mu0, adjusted_mu(mu0, delta_attenuation_db),
          classify(delta_attenuation_db, success_threshold_db, failure_threshold_db)};
}

nlohmann::json to_json(const ImpactReport& report) {
  return {
      {"delta_attenuation_db", report.delta_attenuation_db},
      {"mpn_ratio", report.mpn_ratio},
      {"mu_before", report.mu_before},
      {"mu_after", report.mu_after},
      {"classification", to_string(report.classification)},
  };
}

}  // namespace qla
