#include "qla/fiber_channel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

namespace qla {

namespace {

constexpr double kUm2ToM2 = 1e-12;
constexpr double kKmToM = 1e3;

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

double dbm_to_watts(double p_dbm) { return std::pow(10.0, p_dbm / 10.0) / 1000.0; }

double watts_to_dbm(double p_w) {
  require(p_w > 0.0 && std::isfinite(p_w), "watts_to_dbm: power must be positive");
  return 10.0 * std::log10(p_w * 1000.0);
}

void FiberLink::validate() const {
  require(std::isfinite(length_km) && length_km > 0.0, "fiber length must be > 0 km");
  require(std::isfinite(alpha_per_km) && alpha_per_km >= 0.0, "fiber loss must be >= 0");
  require(a_eff_um2 > 0.0, "effective area must be > 0");
  require(g_r_m_per_w > 0.0, "Raman gain must be > 0");
  require(g_b_m_per_w > 0.0, "Brillouin gain must be > 0");
  require(delta_nu_b_mhz > 0.0, "Brillouin bandwidth must be > 0");
}

void LaserSource::validate() const {
  require(std::isfinite(max_power_w) && max_power_w >= 0.0, "laser max power must be >= 0");
  require(std::isfinite(linewidth_ghz) && linewidth_ghz >= 0.0, "laser linewidth must be >= 0");
  require(wavelength_nm > 0.0, "laser wavelength must be > 0");
}

const char* to_string(PowerLimit limit) {
  switch (limit) {
    case PowerLimit::Srs: return "srs";
    case PowerLimit::Sbs: return "sbs";
    case PowerLimit::Laser: return "laser";
  }
  return "unknown";
}

double effective_length_m(const FiberLink& link) {
  link.validate();
  const double length_m = link.length_km * kKmToM;
  const double alpha_per_m = link.alpha_per_km / kKmToM;
  // -expm1(-x)/alpha keeps full precision for short or nearly lossless fiber.
  if (alpha_per_m == 0.0) return length_m;
  return -std::expm1(-alpha_per_m * length_m) / alpha_per_m;
}

double srs_threshold_w(const FiberLink& link) {
  return 20.0 * link.a_eff_um2 * kUm2ToM2 / (link.g_r_m_per_w * effective_length_m(link));
}

double sbs_broadening_factor(const FiberLink& link, const LaserSource& laser) {
  laser.validate();
  return 1.0 + laser.linewidth_ghz * 1e3 / link.delta_nu_b_mhz;
}

double sbs_threshold_w(const FiberLink& link, const LaserSource& laser) {
  const double narrowband =
      21.0 * link.a_eff_um2 * kUm2ToM2 / (link.g_b_m_per_w * effective_length_m(link));
  return narrowband * sbs_broadening_factor(link, laser);
}

InjectableLimit max_injectable_power(const FiberLink& link, const LaserSource& laser) {
  InjectableLimit limit{laser.max_power_w, PowerLimit::Laser};
  if (const double srs = srs_threshold_w(link); srs < limit.power_w) {
    limit = {srs, PowerLimit::Srs};
  }
  if (const double sbs = sbs_threshold_w(link, laser); sbs < limit.power_w) {
    limit = {sbs, PowerLimit::Sbs};
  }
  return limit;
}

double delivered_power_w(const FiberLink& link, double p_in_w) {
  link.validate();
  require(std::isfinite(p_in_w) && p_in_w >= 0.0, "input power must be >= 0");
  return p_in_w * std::exp(-link.alpha_per_km * link.length_km);
}

std::vector<ThresholdPoint> threshold_curve(const FiberLink& link_template,
                                            const LaserSource& laser,
                                            double l_min_km, double l_max_km,
                                            int n_points) {
  require(l_min_km > 0.0 && l_max_km > l_min_km, "threshold_curve: need 0 < l_min < l_max");
  require(n_points >= 2, "threshold_curve: need at least 2 points");

  const double log_min = std::log(l_min_km);
  const double log_span = std::log(l_max_km) - log_min;

  std::vector<ThresholdPoint> curve;
  curve.reserve(static_cast<std::size_t>(n_points));
  FiberLink link = link_template;
  for (int i = 0; i < n_points; ++i) {
    if (i == 0) {
      link.length_km = l_min_km;
    } else if (i == n_points - 1) {
      link.length_km = l_max_km;
    } else {
      link.length_km = std::exp(log_min + log_span * i / (n_points - 1));
    }
    curve.push_back({link.length_km, srs_threshold_w(link), sbs_threshold_w(link, laser)});
  }
  return curve;
}

void write_threshold_csv(std::ostream& os, const std::vector<ThresholdPoint>& curve) {
  os << "length_km,p_srs_w,p_sbs_w\n";
  char line[128];
  for (const auto& p : curve) {
    std::snprintf(line, sizeof line, "%.10g,%.10g,%.10g\n", p.length_km, p.p_srs_w, p.p_sbs_w);
    os << line;
  }
}

}  // namespace qla
