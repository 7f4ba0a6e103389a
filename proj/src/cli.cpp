#include "qla/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "qla/campaign.hpp"
#include "qla/config.hpp"
#include "qla/fiber_channel.hpp"
#include "qla/risk.hpp"
#include "qla/security_impact.hpp"

namespace qla::cli {

namespace {

// Flag validation failures that CLI11 itself does not catch.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double default_setpoint_db(AttenuatorClass c) {
  switch (c) {
    case AttenuatorClass::ManualVoa: return 31.0;
    case AttenuatorClass::Fixed: return baseline::kFixedNominalDb;
    case AttenuatorClass::MemsVoa: return 30.0;
    case AttenuatorClass::VdmcVoa: return 50.0;
  }
  return 0.0;
}

struct ThresholdArgs {
  double l_min_km = 0.01;
  double l_max_km = 20.0;
  int points = 200;
  FiberLink fiber;
  LaserSource laser;
};

struct CampaignArgs {
  std::string cls;
  std::optional<double> setpoint_db;
  std::int64_t trials = 1;
  std::uint64_t seed = 1;
  std::string config_path;
  bool per_trial = false;
  unsigned threads = 0;
};

struct ImpactArgs {
  double delta_db = 0.0;
  double mu0 = 0.5;
};

struct RiskArgs {
  std::int64_t tested = 5;
  std::int64_t compromised = 4;
  std::int64_t dos = 0;
  std::int64_t population = 50;
  double fraction = 0.2;
  std::string prior = "jeffreys";
};

void emit(const std::string& text, const std::string& output_path, std::ostream& out) {
  if (output_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(output_path, std::ios::binary);
  if (!file) throw UsageError("cannot write output file '" + output_path + "'");
  file << text;
}

std::string dump(const nlohmann::json& doc) { return doc.dump(2) + "\n"; }

std::string run_thresholds(const ThresholdArgs& a) {
  const auto curve = threshold_curve(a.fiber, a.laser, a.l_min_km, a.l_max_km, a.points);
  std::ostringstream os;
  write_threshold_csv(os, curve);
  return os.str();
}

ToolkitConfig campaign_config(const CampaignArgs& a) {
  std::string path = a.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv("QLA_CONFIG"); env != nullptr) path = env;
  }
  return path.empty() ? ToolkitConfig{} : load_config(path);
}

std::string run_campaign_cmd(const CampaignArgs& a) {
  AttenuatorClass cls;
  try {
    cls = attenuator_class_from_string(a.cls);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (a.trials < 1) throw UsageError("--trials must be >= 1");
  const ToolkitConfig cfg = campaign_config(a);
  const double setpoint = a.setpoint_db.value_or(default_setpoint_db(cls));
  const DamageProfile& profile = cfg.profile(cls);

  if (a.trials == 1 && !a.per_trial) {
    const TrialSeeds seeds = trial_seeds(a.seed, 0);
    Rng rng(seeds.campaign);
    const CampaignResult result =
        run_campaign(cfg.campaign, new_attenuator(cls, profile, setpoint, seeds.attenuator),
                     cfg.fiber, cfg.laser, rng);
    nlohmann::json doc = campaign_result_json(cfg.campaign, result);
    doc["seed"] = a.seed;
    doc["setpoint_db"] = setpoint;
    return dump(doc);
  }

  const MonteCarloRun run = monte_carlo(cfg.campaign, cls, profile, setpoint, a.trials, a.seed,
                                        cfg.fiber, cfg.laser, a.per_trial, a.threads);
  nlohmann::json doc = {
      {"schema", 1},
      {"class", to_string(cls)},
      {"setpoint_db", setpoint},
      {"seed", a.seed},
      {"config", to_json(cfg.campaign)},
      {"summary", to_json(run.summary)},
  };
  if (a.per_trial) {
    nlohmann::json trials = nlohmann::json::array();
    for (const auto& r : run.trials) trials.push_back(campaign_result_json(cfg.campaign, r));
    doc["trials"] = std::move(trials);
  }
  return dump(doc);
}

std::string run_impact(const ImpactArgs& a, std::ostream& err) {
  if (!(a.mu0 > 0.0)) throw UsageError("--mu0 must be > 0");
  const ImpactReport report = make_impact_report(a.delta_db, a.mu0);
  err << std::fixed << std::setprecision(3) << "attenuation change " << report.delta_attenuation_db
      << " dB -> mean photon number x" << report.mpn_ratio << " (" << report.mu_before << " -> "
      << report.mu_after << "): " << to_string(report.classification) << "\n";
  err.unsetf(std::ios::floatfield);
  return dump(to_json(report));
}

std::string run_risk(const RiskArgs& a) {
  RiskQuery q;
  q.record = {a.tested, a.compromised, a.dos};
  q.population_total = a.population;
  q.vulnerable_fraction = a.fraction;
  q.prior = prior_from_string(a.prior);
  q.validate();
  return dump(risk_report_json(q));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Laser-damage attack simulator for QKD source attenuators", "qla"};
  app.require_subcommand(1);
  std::string output_path;

  ThresholdArgs ta;
  auto* thresholds = app.add_subcommand("thresholds", "Backward SRS/SBS injection thresholds (CSV)");
  thresholds->add_option("--l-min-km", ta.l_min_km, "Shortest fiber length (km)");
  thresholds->add_option("--l-max-km", ta.l_max_km, "Longest fiber length (km)");
  thresholds->add_option("--points", ta.points, "Number of log-spaced grid points");
  thresholds->add_option("--linewidth-ghz", ta.laser.linewidth_ghz, "Pump linewidth (GHz)");
  thresholds->add_option("--alpha-per-km", ta.fiber.alpha_per_km, "Fiber loss (natural, 1/km)");
  thresholds->add_option("--a-eff-um2", ta.fiber.a_eff_um2, "Effective core area (um^2)");
  thresholds->add_option("--g-r-m-per-w", ta.fiber.g_r_m_per_w, "Raman gain (m/W)");
  thresholds->add_option("--g-b-m-per-w", ta.fiber.g_b_m_per_w, "Brillouin gain (m/W)");
  thresholds->add_option("--delta-nu-b-mhz", ta.fiber.delta_nu_b_mhz, "Brillouin bandwidth (MHz)");
  thresholds->add_option("--output", output_path, "Write to file instead of stdout");

  CampaignArgs ca;
  auto* campaign = app.add_subcommand("campaign", "Simulate the stepwise laser-damage test (JSON)");
  campaign->add_option("--class", ca.cls, "manual-voa | fixed | mems-voa | vdmc-voa")->required();
  campaign->add_option("--setpoint-db", ca.setpoint_db, "Attenuation setpoint (dB)");
  campaign->add_option("--trials", ca.trials, "Number of seeded trials");
  campaign->add_option("--seed", ca.seed, "Master seed");
  campaign->add_option("--config", ca.config_path, "JSON configuration (fallback: $QLA_CONFIG)");
  campaign->add_flag("--per-trial", ca.per_trial, "Include every trial's log");
  campaign->add_option("--threads", ca.threads, "Worker threads (0 = hardware)");
  campaign->add_option("--output", output_path, "Write to file instead of stdout");

  ImpactArgs ia;
  auto* impact = app.add_subcommand("impact", "Mean-photon-number impact of an attenuation change");
  impact->add_option("--delta-db", ia.delta_db, "Attenuation change (dB)")->required();
  impact->add_option("--mu0", ia.mu0, "Mean photon number before the change");
  impact->add_option("--output", output_path, "Write to file instead of stdout");

  RiskArgs ra;
  auto* risk = app.add_subcommand("risk", "Bayesian vulnerability prediction for untested systems");
  risk->add_option("--tested", ra.tested, "Systems tested");
  risk->add_option("--compromised", ra.compromised, "Systems compromised");
  risk->add_option("--dos", ra.dos, "Denial-of-service outcomes");
  risk->add_option("--population", ra.population, "Total number of systems");
  risk->add_option("--fraction", ra.fraction, "Vulnerable fraction of the untested systems");
  risk->add_option("--prior", ra.prior, "jeffreys | uniform");
  risk->add_option("--output", output_path, "Write to file instead of stdout");

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.emplace_back("qla");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "qla: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    std::string text;
    if (*thresholds) {
      text = run_thresholds(ta);
    } else if (*campaign) {
      text = run_campaign_cmd(ca);
    } else if (*impact) {
      text = run_impact(ia, err);
    } else {
      text = run_risk(ra);
    }
    emit(text, output_path, out);
  } catch (const ConfigError& e) {
    err << "qla: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "qla: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace qla::cli
