#include "qla/attenuator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qla/fiber_channel.hpp"

namespace qla {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// MEMS: top 30% of the attenuation range is where mirror damage shows up,
// tapering to nothing over the next 10%.
constexpr double kMemsBandFraction = 0.30;
constexpr double kMemsTaperFraction = 0.10;
constexpr double kMemsVoltScale = 5.0;

// VDMC dip geometry, in dB of programmed setting.
constexpr double kDipHalfWidthDb = 0.5;
constexpr double kDipMaxShiftDb = 0.3;
// Fraction of remaining headroom (down to the insertion-loss floor) taken by
// each exposure at a new, higher power on an already damaged spot.
constexpr double kDipDeepenFraction = 0.15;
// Powers closer than this to a spot's previous maximum are not "higher".
constexpr double kPowerResolutionDb = 0.05;

// Exposure time needed at a power offset (dB) from the sampled attack
// threshold: 2.8 W (34.5 dBm) for 10 s, 2.2 W (33.4 dBm) for ~40 s,
// 2.0 W (33.0 dBm) for 200 s, nothing below.
struct DoseAnchor {
  double excess_db;
  double seconds;
};
constexpr DoseAnchor kDoseAnchors[] = {{-0.1, 10.0}, {-1.1, 40.0}, {-1.5, 200.0}};

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

double power_dbm(double power_w) {
  return power_w > 0.0 ? watts_to_dbm(power_w) : -kInf;
}

Susceptibility draw_susceptibility(const DamageProfile& p, Rng& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  if (u < p.success_probability) return Susceptibility::Vulnerable;
  if (u < p.success_probability + p.failure_probability) return Susceptibility::Fragile;
  return Susceptibility::Resistant;
}

double draw_success_delta(const DamageProfile& p, Rng& rng) {
  const double cap = p.max_success_delta_db;
  if (p.success_delta_db_spread == 0.0) return std::min(p.success_delta_db_mean, cap);
  std::normal_distribution<double> normal(p.success_delta_db_mean, p.success_delta_db_spread);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    if (const double d = normal(rng); d <= cap) return d;
  }
  return cap;
}

double heating_fraction(double duration_s, double tau_s) {
  return tau_s > 0.0 ? -std::expm1(-duration_s / tau_s) : 1.0;
}

void check_control(AttenuatorClass c, double control) {
  const auto [lo, hi] = control_range(c);
  if (!(control >= lo - 1e-12 && control <= hi + 1e-12)) {
    throw std::out_of_range("control value outside the attenuator's range");
  }
}

DamagePoint& point_at(AttenuatorState& s, Rng& rng) {
  for (auto& p : s.points) {
    if (std::abs(p.setting_db - s.setpoint) < 1e-9) return p;
  }
  DamagePoint fresh;
  fresh.setting_db = s.setpoint;
  fresh.susceptibility = draw_susceptibility(s.profile, rng);
  s.points.push_back(fresh);
  return s.points.back();
}

ExposureOutcome outcome_from_delta(double delta_db, ExposureKind drop_kind) {
  if (delta_db < 0.0) return {drop_kind, delta_db};
  return {ExposureKind::NoChange, delta_db};
}

void expose_fixed(AttenuatorState& s, double p_dbm, double duration_s, Rng& rng,
                  bool& failed) {
  const DamageProfile& prof = s.profile;
  if (p_dbm >= s.sampled_attack_threshold_dbm) {
    const double reference = heating_fraction(prof.reference_dwell_s, prof.heating_tau_s);
    const double dwell_drop = s.susceptibility == Susceptibility::Vulnerable
                                  ? s.drawn_success_delta_db
                                  : prof.weak_drop_fraction * prof.success_delta_db_mean;
    const double target = dwell_drop / reference;
    s.thermal_offset_db =
        target + (s.thermal_offset_db - target) *
                     (1.0 - heating_fraction(duration_s, prof.heating_tau_s));
  } else if (prof.recovery_tau_s > 0.0) {
    s.thermal_offset_db *= std::exp(-duration_s / prof.recovery_tau_s);
  }

  if (s.susceptibility == Susceptibility::Fragile && s.permanent.empty() &&
      p_dbm >= s.sampled_failure_threshold_dbm) {
    const double extra = std::uniform_real_distribution<double>(0.0, 0.5)(rng);
    s.permanent.push_back({DamageFeature::Shape::Uniform, prof.failure_jump_db * (1.0 + extra)});
    failed = true;
  }
}

void expose_mems(AttenuatorState& s, double p_dbm, bool& failed) {
  if (s.susceptibility == Susceptibility::Fragile && p_dbm >= s.sampled_failure_threshold_dbm) {
    s.destroyed = true;
    failed = true;
    return;
  }
  if (s.susceptibility != Susceptibility::Vulnerable || !s.permanent.empty() ||
      p_dbm < s.sampled_attack_threshold_dbm) {
    return;
  }
  using namespace baseline;
  const double range = kMemsMaxDb - kMemsMinDb;
  const double band_edge =
      std::min(kMemsMinDb + (1.0 - kMemsBandFraction) * range,
               mems_attenuation_db(s.setpoint));
  DamageFeature band;
  band.shape = DamageFeature::Shape::Band;
  band.depth_db = s.drawn_success_delta_db;
  band.minimum = band_edge;
  band.left = band_edge - kMemsTaperFraction * range;
  band.right = kInf;
  s.permanent.push_back(band);
}

void expose_vdmc(AttenuatorState& s, double p_dbm, double duration_s, Rng& rng,
                 bool& failed) {
  const DamageProfile& prof = s.profile;
  DamagePoint& pt = point_at(s, rng);
  if (pt.susceptibility == Susceptibility::Fragile && p_dbm >= s.sampled_failure_threshold_dbm) {
    s.destroyed = true;
    failed = true;
    return;
  }
  pt.exposure_s += duration_s;
  const double previous_max = pt.max_power_dbm;
  pt.max_power_dbm = std::max(pt.max_power_dbm, p_dbm);

  const double baseline_db = baseline::vdmc_attenuation_db(pt.setting_db, prof.insertion_loss_floor_db);
  const double headroom = prof.insertion_loss_floor_db - baseline_db;

  if (pt.feature) {
    if (p_dbm > previous_max + kPowerResolutionDb) {
      DamageFeature& dip = s.permanent[*pt.feature];
      dip.depth_db += (headroom - dip.depth_db) * kDipDeepenFraction;
    }
    return;
  }
  if (pt.susceptibility != Susceptibility::Vulnerable) return;

  const double excess = p_dbm - s.sampled_attack_threshold_dbm;
  const double required = vdmc_required_exposure_s(excess);
  if (!std::isfinite(required)) return;
  pt.dose += duration_s / required;
  if (pt.dose < 1.0 - 1e-9) return;

  const bool first_point = s.points.size() == 1;
  double depth = first_point ? s.drawn_success_delta_db : draw_success_delta(prof, rng);
  depth = std::max(depth, headroom);

  // Below the optimal power the dip minimum wanders off the exposure point.
  double shift = 0.0;
  if (excess < kDoseAnchors[0].excess_db) {
    const double lowest = kDoseAnchors[std::size(kDoseAnchors) - 1].excess_db;
    const double severity = std::clamp(excess / lowest, 0.0, 1.0);
    const bool upward = std::bernoulli_distribution(0.5)(rng);
    shift = (upward ? 1.0 : -1.0) * kDipMaxShiftDb * severity;
  }
  DamageFeature dip;
  dip.shape = DamageFeature::Shape::Dip;
  dip.depth_db = depth;
  dip.left = pt.setting_db - kDipHalfWidthDb;
  dip.minimum = pt.setting_db + shift;
  dip.right = pt.setting_db + kDipHalfWidthDb;
  pt.feature = s.permanent.size();
  s.permanent.push_back(dip);
}

}  // namespace

const char* to_string(AttenuatorClass c) {
  switch (c) {
    case AttenuatorClass::ManualVoa: return "manual-voa";
    case AttenuatorClass::Fixed: return "fixed";
    case AttenuatorClass::MemsVoa: return "mems-voa";
    case AttenuatorClass::VdmcVoa: return "vdmc-voa";
  }
  return "unknown";
}

AttenuatorClass attenuator_class_from_string(const std::string& name) {
  for (auto c : {AttenuatorClass::ManualVoa, AttenuatorClass::Fixed, AttenuatorClass::MemsVoa,
                 AttenuatorClass::VdmcVoa}) {
    if (name == to_string(c)) return c;
  }
  throw std::invalid_argument("unknown attenuator class '" + name + "'");
}

const char* to_string(ExposureKind k) {
  switch (k) {
    case ExposureKind::NoChange: return "NoChange";
    case ExposureKind::TemporaryDrop: return "TemporaryDrop";
    case ExposureKind::PermanentDrop: return "PermanentDrop";
    case ExposureKind::CriticalFailure: return "CriticalFailure";
  }
  return "Unknown";
}

void DamageProfile::validate() const {
  require(std::isfinite(attack_threshold_dbm) && std::isfinite(failure_threshold_dbm),
          "damage thresholds must be finite");
  require(attack_threshold_dbm <= failure_threshold_dbm,
          "attack threshold must not exceed failure threshold");
  require(threshold_dispersion_dbm >= 0.0, "threshold dispersion must be >= 0");
  require(success_delta_db_spread >= 0.0, "success delta spread must be >= 0");
  require(max_success_delta_db < 0.0, "success drop cap must be negative");
  require(success_probability >= 0.0 && success_probability <= 1.0,
          "success probability must be in [0, 1]");
  require(failure_probability >= 0.0 && failure_probability <= 1.0,
          "failure probability must be in [0, 1]");
  require(success_probability + failure_probability <= 1.0 + 1e-12,
          "success + failure probability must not exceed 1");
  require(recovery_tau_s >= 0.0 && heating_tau_s >= 0.0, "time constants must be >= 0");
  require(reference_dwell_s > 0.0, "reference dwell must be > 0");
  require(weak_drop_fraction >= 0.0, "weak drop fraction must be >= 0");
  require(insertion_loss_floor_db >= 0.0, "insertion loss floor must be >= 0");
  require(destroyed_attenuation_db >= 0.0 && failure_jump_db >= 0.0,
          "failure attenuation values must be >= 0");
}

DamageProfile DamageProfile::defaults(AttenuatorClass c) {
  DamageProfile p;
  switch (c) {
    case AttenuatorClass::ManualVoa:
      // No threshold was reached within the 9 W (39.5 dBm) available.
      p.attack_threshold_dbm = 40.0;
      p.failure_threshold_dbm = 40.0;
      p.threshold_dispersion_dbm = 0.0;
      break;
    case AttenuatorClass::Fixed:
      p.attack_threshold_dbm = 34.0;
      p.failure_threshold_dbm = 37.2;
      p.success_delta_db_mean = -1.37;
      p.success_delta_db_spread = 0.15;
      p.success_probability = 4.0 / 12.0;
      p.failure_probability = 6.0 / 12.0;
      p.recovery_tau_s = 150.0;
      // 1.37 dB after a 10 s dwell saturating near 2 dB on long exposures.
      p.heating_tau_s = 8.66;
      break;
    case AttenuatorClass::MemsVoa:
      p.attack_threshold_dbm = 36.2;
      p.failure_threshold_dbm = 36.6;
      p.success_delta_db_mean = -5.34;
      p.success_delta_db_spread = 2.5;
      p.success_probability = 8.0 / 13.0;
      p.failure_probability = 4.0 / 13.0;
      p.permanent = true;
      p.destroyed_attenuation_db = 75.0;
      break;
    case AttenuatorClass::VdmcVoa:
      p.attack_threshold_dbm = 34.5;
      p.failure_threshold_dbm = 36.5;
      p.success_delta_db_mean = -9.59;
      p.success_delta_db_spread = 3.6;
      p.success_probability = 18.0 / 25.0;
      p.failure_probability = 0.0;
      p.permanent = true;
      p.insertion_loss_floor_db = 1.7;
      p.destroyed_attenuation_db = 90.0;
      break;
  }
  return p;
}

double DamageFeature::offset_at(double control, double baseline_db) const {
  switch (shape) {
    case Shape::Uniform:
      return depth_db;
    case Shape::Band:
      if (baseline_db >= minimum) return depth_db;
      if (baseline_db <= left) return 0.0;
      return depth_db * (baseline_db - left) / (minimum - left);
    case Shape::Dip:
      if (control <= left || control >= right) return 0.0;
      if (control <= minimum) return depth_db * (control - left) / (minimum - left);
      return depth_db * (right - control) / (right - minimum);
  }
  return 0.0;
}

namespace baseline {

double mems_attenuation_db(double volts) {
  const double norm = -std::expm1(-kMemsMaxVolts / kMemsVoltScale);
  return kMemsMinDb + (kMemsMaxDb - kMemsMinDb) * -std::expm1(-volts / kMemsVoltScale) / norm;
}

double mems_voltage_for(double attenuation_db) {
  const double norm = -std::expm1(-kMemsMaxVolts / kMemsVoltScale);
  const double frac = (attenuation_db - kMemsMinDb) / (kMemsMaxDb - kMemsMinDb);
  return -kMemsVoltScale * std::log1p(-frac * norm);
}

double vdmc_attenuation_db(double setting_db, double insertion_loss_db) {
  return insertion_loss_db + setting_db * (1.0 - insertion_loss_db / kVdmcMaxSettingDb);
}

}  // namespace baseline

std::pair<double, double> control_range(AttenuatorClass c) {
  using namespace baseline;
  switch (c) {
    case AttenuatorClass::ManualVoa: return {kManualMinDb, kManualMaxDb};
    case AttenuatorClass::Fixed: return {kFixedNominalDb, kFixedNominalDb};
    case AttenuatorClass::MemsVoa: return {0.0, kMemsMaxVolts};
    case AttenuatorClass::VdmcVoa: return {0.0, kVdmcMaxSettingDb};
  }
  return {0.0, 0.0};
}

AttenuatorState new_attenuator(AttenuatorClass c, const DamageProfile& profile,
                               double setpoint_db, std::uint64_t seed) {
  profile.validate();
  AttenuatorState s;
  s.cls = c;
  s.profile = profile;
  if (c == AttenuatorClass::MemsVoa) {
    if (!(setpoint_db >= baseline::kMemsMinDb && setpoint_db <= baseline::kMemsMaxDb)) {
      throw std::out_of_range("MEMS setpoint must be within 1-34 dB");
    }
    s.setpoint = baseline::mems_voltage_for(setpoint_db);
  } else {
    check_control(c, setpoint_db);
    s.setpoint = setpoint_db;
  }

  // Fixed draw order keeps states reproducible from the seed alone.
  Rng rng(seed);
  std::uniform_real_distribution<double> jitter(-profile.threshold_dispersion_dbm,
                                                profile.threshold_dispersion_dbm);
  s.sampled_attack_threshold_dbm = profile.attack_threshold_dbm + jitter(rng);
  s.sampled_failure_threshold_dbm =
      std::max(profile.failure_threshold_dbm + jitter(rng), s.sampled_attack_threshold_dbm);
  s.susceptibility = draw_susceptibility(profile, rng);
  s.drawn_success_delta_db = draw_success_delta(profile, rng);

  if (c == AttenuatorClass::VdmcVoa) {
    DamagePoint first;
    first.setting_db = s.setpoint;
    first.susceptibility = s.susceptibility;
    s.points.push_back(first);
  }
  return s;
}

double baseline_attenuation(const AttenuatorState& state, double control) {
  check_control(state.cls, control);
  switch (state.cls) {
    case AttenuatorClass::ManualVoa: return control;
    case AttenuatorClass::Fixed: return baseline::kFixedNominalDb;
    case AttenuatorClass::MemsVoa: return baseline::mems_attenuation_db(control);
    case AttenuatorClass::VdmcVoa:
      return baseline::vdmc_attenuation_db(control, state.profile.insertion_loss_floor_db);
  }
  return 0.0;
}

double attenuation(const AttenuatorState& state, double control) {
  const double base = baseline_attenuation(state, control);
  if (state.destroyed) return state.profile.destroyed_attenuation_db;
  double total = base + state.thermal_offset_db;
  for (const auto& f : state.permanent) total += f.offset_at(control, base);
  return std::max(total, state.profile.insertion_loss_floor_db);
}

AttenuatorState with_setpoint(AttenuatorState state, double control) {
  if (state.cls == AttenuatorClass::Fixed) {
    throw std::logic_error("a fixed attenuator has no adjustable setpoint");
  }
  check_control(state.cls, control);
  state.setpoint = control;
  return state;
}

ExposureResult apply_exposure(AttenuatorState state, double power_w, double duration_s, Rng& rng) {
  require(std::isfinite(power_w) && power_w >= 0.0, "exposure power must be >= 0");
  require(std::isfinite(duration_s) && duration_s > 0.0, "exposure duration must be > 0");
  if (state.destroyed) throw std::logic_error("cannot expose a destroyed attenuator");

  const double before = attenuation_at_setpoint(state);
  const double p_dbm = power_dbm(power_w);
  bool failed = false;
  ExposureKind drop_kind = ExposureKind::PermanentDrop;

  switch (state.cls) {
    case AttenuatorClass::ManualVoa:
      break;
    case AttenuatorClass::Fixed:
      expose_fixed(state, p_dbm, duration_s, rng, failed);
      drop_kind = ExposureKind::TemporaryDrop;
      break;
    case AttenuatorClass::MemsVoa:
      expose_mems(state, p_dbm, failed);
      break;
    case AttenuatorClass::VdmcVoa:
      expose_vdmc(state, p_dbm, duration_s, rng, failed);
      break;
  }
  state.clock_s += duration_s;

  const double delta = attenuation_at_setpoint(state) - before;
  ExposureOutcome outcome = failed ? ExposureOutcome{ExposureKind::CriticalFailure, delta}
                                   : outcome_from_delta(delta, drop_kind);
  return {std::move(state), outcome};
}

AttenuatorState cool_down(AttenuatorState state, double elapsed_s) {
  require(std::isfinite(elapsed_s) && elapsed_s >= 0.0, "cool-down time must be >= 0");
  if (elapsed_s == 0.0) return state;
  const double tau = state.profile.recovery_tau_s;
  state.thermal_offset_db = tau > 0.0 ? state.thermal_offset_db * std::exp(-elapsed_s / tau) : 0.0;
  state.clock_s += elapsed_s;
  return state;
}

double vdmc_required_exposure_s(double excess_db) {
  constexpr auto& a = kDoseAnchors;
  constexpr std::size_t n = std::size(kDoseAnchors);
  if (excess_db >= a[0].excess_db) return a[0].seconds;
  if (excess_db < a[n - 1].excess_db) return kInf;
  for (std::size_t i = 1; i < n; ++i) {
    if (excess_db >= a[i].excess_db) {
      const double t = (excess_db - a[i - 1].excess_db) / (a[i].excess_db - a[i - 1].excess_db);
      return std::exp(std::log(a[i - 1].seconds) +
                      t * (std::log(a[i].seconds) - std::log(a[i - 1].seconds)));
    }
  }
  return a[n - 1].seconds;
}

}  // namespace qla
