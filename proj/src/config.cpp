#include "qla/config.hpp"

#include <fstream>
#include <functional>
#include <map>

namespace qla {

namespace {

using nlohmann::json;

// Binds JSON keys to struct members for one section.
class Section {
 public:
  explicit Section(std::string name) : name_(std::move(name)) {}

  Section& number(const std::string& key, double& target) {
    setters_[key] = [this, key, &target](const json& v) {
      if (!v.is_number()) fail(key, "expected a number");
      target = v.get<double>();
    };
    return *this;
  }

  Section& boolean(const std::string& key, bool& target) {
    setters_[key] = [this, key, &target](const json& v) {
      if (!v.is_boolean()) fail(key, "expected a boolean");
      target = v.get<bool>();
    };
    return *this;
  }

  void apply(const json& doc) const {
    if (!doc.is_object()) throw ConfigError(name_ + ": expected an object");
    for (const auto& [key, value] : doc.items()) {
      const auto it = setters_.find(key);
      if (it == setters_.end()) fail(key, "unknown key");
      it->second(value);
    }
  }

 private:
  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError(name_ + "." + key + ": " + what);
  }

  std::string name_;
  std::map<std::string, std::function<void(const json&)>> setters_;
};

Section campaign_section(CampaignConfig& c) {
  Section s("campaign");
  s.number("start_power_dbm", c.start_power_dbm)
      .number("step_dbm", c.step_dbm)
      .number("dwell_s", c.dwell_s)
      .number("success_delta_db", c.success_delta_db)
      .number("failure_delta_db", c.failure_delta_db)
      .number("max_power_dbm", c.max_power_dbm)
      .number("cooldown_s", c.cooldown_s)
      .boolean("connectorized_output", c.connectorized_output)
      .number("fuse_threshold_w", c.fuse_threshold_w);
  return s;
}

Section fiber_section(FiberLink& f) {
  Section s("fiber");
  s.number("length_km", f.length_km)
      .number("alpha_per_km", f.alpha_per_km)
      .number("a_eff_um2", f.a_eff_um2)
      .number("g_r_m_per_w", f.g_r_m_per_w)
      .number("g_b_m_per_w", f.g_b_m_per_w)
      .number("delta_nu_b_mhz", f.delta_nu_b_mhz);
  return s;
}

Section laser_section(LaserSource& l) {
  Section s("laser");
  s.number("max_power_w", l.max_power_w)
      .number("linewidth_ghz", l.linewidth_ghz)
      .number("wavelength_nm", l.wavelength_nm);
  return s;
}

Section profile_section(const std::string& name, DamageProfile& p) {
  Section s("profiles." + name);
  s.number("attack_threshold_dbm", p.attack_threshold_dbm)
      .number("failure_threshold_dbm", p.failure_threshold_dbm)
      .number("threshold_dispersion_dbm", p.threshold_dispersion_dbm)
      .number("success_delta_db_mean", p.success_delta_db_mean)
      .number("success_delta_db_spread", p.success_delta_db_spread)
      .number("max_success_delta_db", p.max_success_delta_db)
      .number("success_probability", p.success_probability)
      .number("failure_probability", p.failure_probability)
      .boolean("permanent", p.permanent)
      .number("recovery_tau_s", p.recovery_tau_s)
      .number("heating_tau_s", p.heating_tau_s)
      .number("reference_dwell_s", p.reference_dwell_s)
      .number("weak_drop_fraction", p.weak_drop_fraction)
      .number("insertion_loss_floor_db", p.insertion_loss_floor_db)
      .number("destroyed_attenuation_db", p.destroyed_attenuation_db)
      .number("failure_jump_db", p.failure_jump_db);
  return s;
}

template <typename Fn>
void validated(const std::string& what, Fn&& fn) {
  try {
    fn();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

}  // namespace

ToolkitConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
  ToolkitConfig cfg;
  for (const auto& [key, value] : doc.items()) {
    if (key == "schema") {
      if (!value.is_number_integer() || value.get<int>() != 1) {
        throw ConfigError("schema: only version 1 is supported");
      }
    } else if (key == "campaign") {
      campaign_section(cfg.campaign).apply(value);
    } else if (key == "fiber") {
      fiber_section(cfg.fiber).apply(value);
    } else if (key == "laser") {
      laser_section(cfg.laser).apply(value);
    } else if (key == "profiles") {
      if (!value.is_object()) throw ConfigError("profiles: expected an object");
      for (const auto& [cls_name, overrides] : value.items()) {
        AttenuatorClass cls;
        try {
          cls = attenuator_class_from_string(cls_name);
        } catch (const std::invalid_argument& e) {
          throw ConfigError(std::string("profiles: ") + e.what());
        }
        profile_section(cls_name, cfg.profile(cls)).apply(overrides);
      }
    } else {
      throw ConfigError(key + ": unknown section");
    }
  }

  validated("campaign", [&] { cfg.campaign.validate(); });
  validated("fiber", [&] { cfg.fiber.validate(); });
  validated("laser", [&] { cfg.laser.validate(); });
  for (const auto& p : cfg.profiles) validated("profiles", [&] { p.validate(); });
  return cfg;
}

ToolkitConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return config_from_json(doc);
}

nlohmann::json to_json(const DamageProfile& p) {
  return {
      {"attack_threshold_dbm", p.attack_threshold_dbm},
      {"failure_threshold_dbm", p.failure_threshold_dbm},
      {"threshold_dispersion_dbm", p.threshold_dispersion_dbm},
      {"success_delta_db_mean", p.success_delta_db_mean},
      {"success_delta_db_spread", p.success_delta_db_spread},
      {"max_success_delta_db", p.max_success_delta_db},
      {"success_probability", p.success_probability},
      {"failure_probability", p.failure_probability},
      {"permanent", p.permanent},
      {"recovery_tau_s", p.recovery_tau_s},
      {"heating_tau_s", p.heating_tau_s},
      {"reference_dwell_s", p.reference_dwell_s},
      {"weak_drop_fraction", p.weak_drop_fraction},
      {"insertion_loss_floor_db", p.insertion_loss_floor_db},
      {"destroyed_attenuation_db", p.destroyed_attenuation_db},
      {"failure_jump_db", p.failure_jump_db},
  };
}

nlohmann::json default_config_json() {
  const ToolkitConfig cfg;
  json profiles = json::object();
  for (auto c : {AttenuatorClass::ManualVoa, AttenuatorClass::Fixed, AttenuatorClass::MemsVoa,
                 AttenuatorClass::VdmcVoa}) {
    profiles[to_string(c)] = to_json(cfg.profile(c));
  }
  return {
      {"schema", 1},
      {"campaign", to_json(cfg.campaign)},
      {"fiber",
       {{"length_km", cfg.fiber.length_km},
        {"alpha_per_km", cfg.fiber.alpha_per_km},
        {"a_eff_um2", cfg.fiber.a_eff_um2},
        {"g_r_m_per_w", cfg.fiber.g_r_m_per_w},
        {"g_b_m_per_w", cfg.fiber.g_b_m_per_w},
        {"delta_nu_b_mhz", cfg.fiber.delta_nu_b_mhz}}},
      {"laser",
       {{"max_power_w", cfg.laser.max_power_w},
        {"linewidth_ghz", cfg.laser.linewidth_ghz},
        {"wavelength_nm", cfg.laser.wavelength_nm}}},
      {"profiles", std::move(profiles)},
  };
}

}  // namespace qla
