#pragma once

#include "json.hpp"

namespace qla {

enum class ImpactClass { Compromised, DenialOfService, Unaffected };

const char* to_string(ImpactClass c);

struct ImpactReport {
  double delta_attenuation_db;
  double mpn_ratio;
  double mu_before;
  double mu_after;
  ImpactClass classification;
};

// Mean photon number scale factor for an attenuation change, 10^(-delta/10).
double mpn_ratio(double delta_attenuation_db);

double adjusted_mu(double mu0, double delta_attenuation_db);

ImpactClass classify(double delta_attenuation_db, double success_threshold_db = -1.0,
                     double failure_threshold_db = 3.0);

ImpactReport make_impact_report(double delta_attenuation_db, double mu0,
                                double success_threshold_db = -1.0,
                                double failure_threshold_db = 3.0);

nlohmann::json to_json(const ImpactReport& report);

}  // namespace qla
