#include "qla/campaign.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace qla {

namespace {

constexpr double kEps = 1e-9;

StepEvent event_from(ExposureKind k) {
  switch (k) {
    case ExposureKind::NoChange: return StepEvent::NoChange;
    case ExposureKind::TemporaryDrop: return StepEvent::TemporaryDrop;
    case ExposureKind::PermanentDrop: return StepEvent::PermanentDrop;
    case ExposureKind::CriticalFailure: return StepEvent::CriticalFailure;
  }
  return StepEvent::NoChange;
}

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

void CampaignConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  require(std::isfinite(start_power_dbm) && std::isfinite(max_power_dbm),
          "campaign powers must be finite");
  require(start_power_dbm <= max_power_dbm, "start power must not exceed max power");
  require(step_dbm >= 0.5 && step_dbm <= 1.0, "power step must be within 0.5-1 dB");
  require(dwell_s >= 10.0, "dwell must be at least 10 s");
  require(success_delta_db < 0.0 && 0.0 < failure_delta_db,
          "need success delta < 0 < failure delta");
  require(cooldown_s >= 0.0, "cool-down must be >= 0");
  require(fuse_threshold_w > 0.0, "fuse threshold must be > 0");
}

const char* to_string(StepEvent e) {
  switch (e) {
    case StepEvent::NoChange: return "NoChange";
    case StepEvent::TemporaryDrop: return "TemporaryDrop";
    case StepEvent::PermanentDrop: return "PermanentDrop";
    case StepEvent::CriticalFailure: return "CriticalFailure";
    case StepEvent::FuseTrip: return "FuseTrip";
  }
  return "Unknown";
}

const char* to_string(CampaignOutcome o) {
  switch (o) {
    case CampaignOutcome::Success: return "Success";
    case CampaignOutcome::CriticalFailure: return "CriticalFailure";
    case CampaignOutcome::Inconclusive: return "Inconclusive";
    case CampaignOutcome::FiberFuseDoS: return "FiberFuseDoS";
  }
  return "Unknown";
}

bool check_fuse(const CampaignConfig& config, double power_w_at_connector) {
  if (!(power_w_at_connector >= 0.0)) throw std::invalid_argument("power must be >= 0");
  return config.connectorized_output && power_w_at_connector >= config.fuse_threshold_w;
}

std::vector<double> power_schedule_dbm(const CampaignConfig& config, double cap_dbm) {
  std::vector<double> powers;
  const double cap = std::min(cap_dbm, config.max_power_dbm);
  for (int i = 0;; ++i) {
    const double p = config.start_power_dbm + i * config.step_dbm;
    if (p > cap + kEps) break;
    powers.push_back(p);
  }
  if (powers.empty() || powers.back() < cap - kEps) powers.push_back(cap);
  return powers;
}

CampaignResult run_campaign(const CampaignConfig& config, AttenuatorState state,
                            const FiberLink& link, const LaserSource& laser, Rng& rng) {
  config.validate();
  link.validate();
  laser.validate();
  if (state.destroyed) throw std::logic_error("campaign target is already destroyed");

  const InjectableLimit limit = max_injectable_power(link, laser);
  if (dbm_to_watts(config.start_power_dbm) > limit.power_w * (1.0 + kEps)) {
    throw std::invalid_argument(std::string("start power exceeds the injectable limit (") +
                                to_string(limit.binding) + "-limited)");
  }

  CampaignResult result;
  const double initial = attenuation_at_setpoint(state);

  for (const double p_set : power_schedule_dbm(config, watts_to_dbm(limit.power_w))) {
    CampaignStep step;
    step.power_dbm_set = p_set;
    step.power_w_delivered = delivered_power_w(link, dbm_to_watts(p_set));
    step.attenuation_before_db = initial;

    if (check_fuse(config, step.power_w_delivered)) {
      step.attenuation_at_shutoff_db = step.attenuation_after_db = attenuation_at_setpoint(state);
      step.delta_db = step.shutoff_delta_db = step.attenuation_after_db - initial;
      step.event = StepEvent::FuseTrip;
      result.steps.push_back(step);
      result.outcome = CampaignOutcome::FiberFuseDoS;
      result.final_state = std::move(state);
      return result;
    }

    auto exposed = apply_exposure(std::move(state), step.power_w_delivered, config.dwell_s, rng);
    state = std::move(exposed.state);
    step.duration_s = config.dwell_s;
    step.event = event_from(exposed.outcome.kind);
    step.attenuation_at_shutoff_db = attenuation_at_setpoint(state);
    state = cool_down(std::move(state), config.cooldown_s);
    step.attenuation_after_db = attenuation_at_setpoint(state);
    step.delta_db = step.attenuation_after_db - step.attenuation_before_db;
    step.shutoff_delta_db = step.attenuation_at_shutoff_db - step.attenuation_before_db;
    result.steps.push_back(step);

    if (state.destroyed || step.delta_db >= config.failure_delta_db) {
      result.outcome = CampaignOutcome::CriticalFailure;
      break;
    }
    if (std::min(step.delta_db, step.shutoff_delta_db) <= config.success_delta_db) {
      result.outcome = CampaignOutcome::Success;
      break;
    }
  }
  result.final_state = std::move(state);
  return result;
}

double success_delta_of(const CampaignResult& result) {
  if (result.steps.empty()) return 0.0;
  const auto& last = result.steps.back();
  return std::min(last.delta_db, last.shutoff_delta_db);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + (stream + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

TrialSeeds trial_seeds(std::uint64_t master, std::int64_t trial) {
  const auto i = static_cast<std::uint64_t>(trial);
  return {derive_seed(master, 2 * i), derive_seed(master, 2 * i + 1)};
}

MonteCarloRun monte_carlo(const CampaignConfig& config, AttenuatorClass cls,
                          const DamageProfile& profile, double setpoint_db,
                          std::int64_t n_trials, std::uint64_t seed, const FiberLink& link,
                          const LaserSource& laser, bool keep_trials, unsigned threads) {
  if (n_trials < 1) throw std::invalid_argument("monte_carlo: need at least one trial");
  config.validate();
  profile.validate();

  std::vector<CampaignResult> results(static_cast<std::size_t>(n_trials));
  auto run_range = [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t i = begin; i < end; ++i) {
      const TrialSeeds s = trial_seeds(seed, i);
      Rng rng(s.campaign);
      results[static_cast<std::size_t>(i)] =
          run_campaign(config, new_attenuator(cls, profile, setpoint_db, s.attenuator), link,
                       laser, rng);
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::int64_t>(threads, n_trials));
  if (threads <= 1) {
    run_range(0, n_trials);
  } else {
    // Each trial owns its RNG streams, so the split does not affect results.
    std::vector<std::jthread> pool;
    const std::int64_t chunk = (n_trials + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::int64_t begin = t * chunk;
      const std::int64_t end = std::min(n_trials, begin + chunk);
      if (begin < end) pool.emplace_back(run_range, begin, end);
    }
  }

  MonteCarloSummary sum;
  sum.n_trials = n_trials;
  double delta_total = 0.0, attack_total = 0.0, failure_total = 0.0;
  for (const auto& r : results) {
    switch (r.outcome) {
      case CampaignOutcome::Success:
        ++sum.successes;
        delta_total += success_delta_of(r);
        attack_total += r.steps.back().power_dbm_set;
        break;
      case CampaignOutcome::CriticalFailure:
        ++sum.critical_failures;
        failure_total += r.steps.back().power_dbm_set;
        break;
      case CampaignOutcome::Inconclusive: ++sum.inconclusive; break;
      case CampaignOutcome::FiberFuseDoS: ++sum.fiber_fuses; break;
    }
  }
  const double n = static_cast<double>(n_trials);
  sum.success_rate = static_cast<double>(sum.successes) / n;
  sum.critical_failure_rate = static_cast<double>(sum.critical_failures) / n;
  if (sum.successes > 0) {
    sum.mean_success_delta_db = delta_total / static_cast<double>(sum.successes);
    sum.mean_attack_threshold_dbm = attack_total / static_cast<double>(sum.successes);
  }
  if (sum.critical_failures > 0) {
    sum.mean_failure_threshold_dbm = failure_total / static_cast<double>(sum.critical_failures);
  }

  MonteCarloRun run{sum, {}};
  if (keep_trials) run.trials = std::move(results);
  return run;
}

nlohmann::json to_json(const CampaignConfig& c) {
  return {
      {"start_power_dbm", c.start_power_dbm},
      {"step_dbm", c.step_dbm},
      {"dwell_s", c.dwell_s},
      {"success_delta_db", c.success_delta_db},
      {"failure_delta_db", c.failure_delta_db},
      {"max_power_dbm", c.max_power_dbm},
      {"cooldown_s", c.cooldown_s},
      {"connectorized_output", c.connectorized_output},
      {"fuse_threshold_w", c.fuse_threshold_w},
  };
}

nlohmann::json to_json(const CampaignStep& s) {
  return {
      {"power_dbm_set", s.power_dbm_set},
      {"power_w_delivered", s.power_w_delivered},
      {"duration_s", s.duration_s},
      {"attenuation_before_db", s.attenuation_before_db},
      {"attenuation_at_shutoff_db", s.attenuation_at_shutoff_db},
      {"attenuation_after_db", s.attenuation_after_db},
      {"delta_db", s.delta_db},
      {"shutoff_delta_db", s.shutoff_delta_db},
      {"event", to_string(s.event)},
  };
}

nlohmann::json campaign_result_json(const CampaignConfig& config, const CampaignResult& result) {
  const AttenuatorState& st = result.final_state;
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : result.steps) steps.push_back(to_json(s));
  return {
      {"schema", 1},
      {"config", to_json(config)},
      {"attenuator",
       {{"class", to_string(st.cls)},
        {"setpoint", st.setpoint},
        {"sampled_attack_threshold_dbm", st.sampled_attack_threshold_dbm},
        {"sampled_failure_threshold_dbm", st.sampled_failure_threshold_dbm},
        {"final_attenuation_db", attenuation_at_setpoint(st)},
        {"destroyed", st.destroyed}}},
      {"steps", std::move(steps)},
      {"outcome", to_string(result.outcome)},
  };
}

nlohmann::json to_json(const MonteCarloSummary& s) {
  return {
      {"n_trials", s.n_trials},
      {"successes", s.successes},
      {"critical_failures", s.critical_failures},
      {"inconclusive", s.inconclusive},
      {"fiber_fuses", s.fiber_fuses},
      {"success_rate", s.success_rate},
      {"critical_failure_rate", s.critical_failure_rate},
      {"mean_success_delta_db", optional_json(s.mean_success_delta_db)},
      {"mean_attack_threshold_dbm", optional_json(s.mean_attack_threshold_dbm)},
      {"mean_failure_threshold_dbm", optional_json(s.mean_failure_threshold_dbm)},
  };
}

}  // namespace qla
