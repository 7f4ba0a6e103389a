#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qla/attenuator.hpp"
#include "qla/fiber_channel.hpp"

namespace qla {

// Stepwise power-escalation test protocol.
struct CampaignConfig {
  double start_power_dbm = 25.0;
  double step_dbm = 0.5;
  double dwell_s = 10.0;
  double success_delta_db = -1.0;
  double failure_delta_db = 3.0;
  double max_power_dbm = 39.5;
  double cooldown_s = 10.0;
  // A connector (rather than a splice) at the attenuator output can start a
  // fiber fuse; the interlock then shuts the amplifier down.
  bool connectorized_output = false;
  double fuse_threshold_w = 4.5;

  void validate() const;
};

enum class StepEvent { NoChange, TemporaryDrop, PermanentDrop, CriticalFailure, FuseTrip };

const char* to_string(StepEvent e);

struct CampaignStep {
  double power_dbm_set = 0.0;
  double power_w_delivered = 0.0;
  double duration_s = 0.0;
  // Pre-campaign calibration reading at the monitored setpoint.
  double attenuation_before_db = 0.0;
  // Reading right after the amplifier is switched off.
  double attenuation_at_shutoff_db = 0.0;
  // Reading after the cool-down interval.
  double attenuation_after_db = 0.0;
  double delta_db = 0.0;
  double shutoff_delta_db = 0.0;
  StepEvent event = StepEvent::NoChange;
};

enum class CampaignOutcome { Success, CriticalFailure, Inconclusive, FiberFuseDoS };

const char* to_string(CampaignOutcome o);

struct CampaignResult {
  CampaignOutcome outcome = CampaignOutcome::Inconclusive;
  std::vector<CampaignStep> steps;
  AttenuatorState final_state;
};

// Interlock check at the attenuator connector; deterministic at/above the
// configured fuse threshold, never for spliced outputs.
bool check_fuse(const CampaignConfig& config, double power_w_at_connector);

// Set powers the campaign would step through if nothing stopped it, capped
// at `cap_dbm`. The cap itself is always the last entry.
std::vector<double> power_schedule_dbm(const CampaignConfig& config, double cap_dbm);

CampaignResult run_campaign(const CampaignConfig& config, AttenuatorState state,
                            const FiberLink& link, const LaserSource& laser, Rng& rng);

struct MonteCarloSummary {
  std::int64_t n_trials = 0;
  std::int64_t successes = 0;
  std::int64_t critical_failures = 0;
  std::int64_t inconclusive = 0;
  std::int64_t fiber_fuses = 0;
  double success_rate = 0.0;
  double critical_failure_rate = 0.0;
  std::optional<double> mean_success_delta_db;
  std::optional<double> mean_attack_threshold_dbm;
  std::optional<double> mean_failure_threshold_dbm;
};

struct MonteCarloRun {
  MonteCarloSummary summary;
  std::vector<CampaignResult> trials;
};

struct TrialSeeds {
  std::uint64_t attenuator;
  std::uint64_t campaign;
};

// Trial i draws its attenuator from stream 2i and its campaign noise from
// stream 2i+1 of the master seed (SplitMix64 finalizer).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);
TrialSeeds trial_seeds(std::uint64_t master, std::int64_t trial);

MonteCarloRun monte_carlo(const CampaignConfig& config, AttenuatorClass cls,
                          const DamageProfile& profile, double setpoint_db,
                          std::int64_t n_trials, std::uint64_t seed,
                          const FiberLink& link = {}, const LaserSource& laser = {},
                          bool keep_trials = false, unsigned threads = 0);

// Monitored-setpoint reading that a trial's success is judged on.
double success_delta_of(const CampaignResult& result);

nlohmann::json to_json(const CampaignConfig& config);
nlohmann::json to_json(const CampaignStep& step);
nlohmann::json campaign_result_json(const CampaignConfig& config, const CampaignResult& result);
nlohmann::json to_json(const MonteCarloSummary& summary);

}  // namespace qla
