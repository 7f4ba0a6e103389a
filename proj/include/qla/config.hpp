#pragma once

#include <array>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "qla/attenuator.hpp"
#include "qla/campaign.hpp"
#include "qla/fiber_channel.hpp"

namespace qla {

// Raised for malformed or out-of-domain configuration documents.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything a campaign run can be configured with.
///
/// Document layout (every section and key optional; unknown keys rejected):
///
///     {
///       "schema": 1,
///       "campaign": { "start_power_dbm": 25, "step_dbm": 0.5, ... },
///       "fiber":    { "length_km": 0.02, "alpha_per_km": 0.05, ... },
///       "laser":    { "max_power_w": 9, "linewidth_ghz": 10, ... },
///       "profiles": { "mems-voa": { "success_probability": 0.6, ... }, ... }
///     }
///
/// Profile entries override the shipped per-class defaults key by key.
struct ToolkitConfig {
  CampaignConfig campaign;
  FiberLink fiber;
  LaserSource laser;
  std::array<DamageProfile, 4> profiles{
      DamageProfile::defaults(AttenuatorClass::ManualVoa),
      DamageProfile::defaults(AttenuatorClass::Fixed),
      DamageProfile::defaults(AttenuatorClass::MemsVoa),
      DamageProfile::defaults(AttenuatorClass::VdmcVoa),
  };

  const DamageProfile& profile(AttenuatorClass c) const {
    return profiles[static_cast<std::size_t>(c)];
  }
  DamageProfile& profile(AttenuatorClass c) { return profiles[static_cast<std::size_t>(c)]; }
};

ToolkitConfig config_from_json(const nlohmann::json& doc);
ToolkitConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const DamageProfile& profile);
// The shipped defaults as a complete configuration document.
nlohmann::json default_config_json();

}  // namespace qla
