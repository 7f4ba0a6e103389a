#pragma once

#include <iosfwd>
#include <vector>

namespace qla {

// Power unit conversions. dBm is referenced to 1 mW.
double dbm_to_watts(double p_dbm);
double watts_to_dbm(double p_w);

/// Injection fiber between the attacker's amplifier and the target.
///
/// Loss is a natural (base-e) coefficient in 1/km so that the transmitted
/// fraction is exp(-alpha * L). Defaults are standard single-mode fiber
/// constants at 1550 nm.
struct FiberLink {
  double length_km = 0.02;
  double alpha_per_km = 0.05;
  double a_eff_um2 = 50.0;
  double g_r_m_per_w = 6.67e-14;
  double g_b_m_per_w = 5e-11;
  double delta_nu_b_mhz = 16.0;

  // Throws std::invalid_argument when any field is out of its domain.
  void validate() const;
};

struct LaserSource {
  double max_power_w = 9.0;
  double linewidth_ghz = 10.0;
  double wavelength_nm = 1550.0;

  void validate() const;
};

enum class PowerLimit { Srs, Sbs, Laser };

const char* to_string(PowerLimit limit);

struct InjectableLimit {
  double power_w;
  PowerLimit binding;
};

struct ThresholdPoint {
  double length_km;
  double p_srs_w;
  double p_sbs_w;
};

// Loss-weighted interaction length in metres; equals L when alpha is zero.
double effective_length_m(const FiberLink& link);

// Backward stimulated Raman threshold, 20 A_eff / (g_R L_eff), in watts.
double srs_threshold_w(const FiberLink& link);

// Backward stimulated Brillouin threshold, 21 A_eff / (g_B L_eff), raised by
// the pump-linewidth factor 1 + dnu_p / dnu_B.
double sbs_threshold_w(const FiberLink& link, const LaserSource& laser);

double sbs_broadening_factor(const FiberLink& link, const LaserSource& laser);

InjectableLimit max_injectable_power(const FiberLink& link, const LaserSource& laser);

// p_in * exp(-alpha L).
double delivered_power_w(const FiberLink& link, double p_in_w);

// Both thresholds on a log-spaced length grid. Only the length of
// `link_template` is varied.
std::vector<ThresholdPoint> threshold_curve(const FiberLink& link_template,
                                            const LaserSource& laser,
                                            double l_min_km, double l_max_km,
                                            int n_points);

// CSV with header `length_km,p_srs_w,p_sbs_w`.
void write_threshold_csv(std::ostream& os, const std::vector<ThresholdPoint>& curve);

}  // namespace qla
