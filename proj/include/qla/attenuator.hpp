#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace qla {

using Rng = std::mt19937_64;

enum class AttenuatorClass { ManualVoa, Fixed, MemsVoa, VdmcVoa };

const char* to_string(AttenuatorClass c);
// Accepts the CLI spellings: manual-voa, fixed, mems-voa, vdmc-voa.
AttenuatorClass attenuator_class_from_string(const std::string& name);

// Per-class damage parameters. The shipped defaults reproduce the aggregate
// laboratory statistics for each attenuator class.
struct DamageProfile {
  double attack_threshold_dbm = 40.0;
  double failure_threshold_dbm = 40.0;
  // Per-sample thresholds are drawn uniformly within +/- this of the means.
  double threshold_dispersion_dbm = 1.0;

  double success_delta_db_mean = 0.0;
  double success_delta_db_spread = 0.0;
  // Drawn success drops are truncated to at most this value so that a
  // vulnerable sample always clears the 1 dB detection threshold.
  double max_success_delta_db = -1.05;

  double success_probability = 0.0;
  double failure_probability = 0.0;
  bool permanent = false;

  // Thermal response (fixed attenuator). Drops are reached with heating_tau_s
  // while powered and decay with recovery_tau_s once off.
  double recovery_tau_s = 0.0;
  double heating_tau_s = 0.0;
  double reference_dwell_s = 10.0;
  // Thermal drop of non-vulnerable fixed samples, as a fraction of the mean.
  double weak_drop_fraction = 0.3;

  double insertion_loss_floor_db = 0.0;
  // Attenuation reported once a sample is destroyed (blocks the channel).
  double destroyed_attenuation_db = 75.0;
  // Minimum permanent increase on critical failure of a non-destroyed class.
  double failure_jump_db = 20.0;

  void validate() const;
  static DamageProfile defaults(AttenuatorClass c);
};

// What a sample does once driven hard enough; drawn once per sample (per
// damage point for VDMC) with the profile's success / failure probabilities.
enum class Susceptibility { Vulnerable, Fragile, Resistant };

enum class ExposureKind { NoChange, TemporaryDrop, PermanentDrop, CriticalFailure };

const char* to_string(ExposureKind k);

struct ExposureOutcome {
  ExposureKind kind = ExposureKind::NoChange;
  // Attenuation change at the current setpoint, immediately after shutoff.
  double delta_db = 0.0;
};

// A permanent attenuation change localized in control space.
struct DamageFeature {
  enum class Shape {
    Uniform,  // depth everywhere
    Band,     // full depth where baseline >= upper_db, linear taper down to lower_db
    Dip,      // triangle: 0 at left, depth at minimum, 0 at right (setting axis)
  };
  Shape shape = Shape::Uniform;
  double depth_db = 0.0;
  double left = 0.0;
  double minimum = 0.0;
  double right = 0.0;

  double offset_at(double control, double baseline_db) const;
};

// VDMC bookkeeping for one irradiated spot on the disk.
struct DamagePoint {
  double setting_db = 0.0;
  Susceptibility susceptibility = Susceptibility::Resistant;
  double dose = 0.0;  // >= 1 once the exposure-time requirement is met
  double exposure_s = 0.0;
  double max_power_dbm = -1e9;
  std::optional<std::size_t> feature;
};

struct AttenuatorState {
  AttenuatorClass cls = AttenuatorClass::ManualVoa;
  DamageProfile profile;
  double sampled_attack_threshold_dbm = 0.0;
  double sampled_failure_threshold_dbm = 0.0;
  Susceptibility susceptibility = Susceptibility::Resistant;
  // Success drop drawn for this sample at construction.
  double drawn_success_delta_db = 0.0;

  // Control units: dB of setting (manual, fixed, VDMC) or volts (MEMS).
  double setpoint = 0.0;
  std::vector<DamageFeature> permanent;
  std::vector<DamagePoint> points;
  double thermal_offset_db = 0.0;
  bool destroyed = false;
  double clock_s = 0.0;
};

// Baseline (undamaged) attenuation curve of each class.
namespace baseline {
inline constexpr double kMemsMinDb = 1.0;
inline constexpr double kMemsMaxDb = 34.0;
inline constexpr double kMemsMaxVolts = 15.0;
inline constexpr double kFixedNominalDb = 25.0;
inline constexpr double kManualMinDb = 1.5;
inline constexpr double kManualMaxDb = 80.0;
inline constexpr double kVdmcMaxSettingDb = 80.0;

double mems_attenuation_db(double volts);
double mems_voltage_for(double attenuation_db);
double vdmc_attenuation_db(double setting_db, double insertion_loss_db);
}  // namespace baseline

// Valid control range for attenuation queries, in the class's control units.
std::pair<double, double> control_range(AttenuatorClass c);

// `setpoint_db` is the requested attenuation; MEMS converts it to a voltage.
AttenuatorState new_attenuator(AttenuatorClass c, const DamageProfile& profile,
                               double setpoint_db, std::uint64_t seed);

double baseline_attenuation(const AttenuatorState& state, double control);
double attenuation(const AttenuatorState& state, double control);
inline double attenuation_at_setpoint(const AttenuatorState& state) {
  return attenuation(state, state.setpoint);
}

// Moves a VDMC disk (or MEMS voltage, manual screw) to another control value.
AttenuatorState with_setpoint(AttenuatorState state, double control);

struct ExposureResult {
  AttenuatorState state;
  ExposureOutcome outcome;
};

ExposureResult apply_exposure(AttenuatorState state, double power_w, double duration_s, Rng& rng);

AttenuatorState cool_down(AttenuatorState state, double elapsed_s);

// Time a VDMC spot must accumulate at a power `excess_db` above (negative:
// below) its attack threshold. Infinite below the lowest effective power.
double vdmc_required_exposure_s(double excess_db);

}  // namespace qla
