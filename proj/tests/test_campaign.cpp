#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "qla/campaign.hpp"

using namespace qla;

namespace {

DamageProfile pinned(AttenuatorClass c, double attack_dbm, Susceptibility fate) {
  DamageProfile p = DamageProfile::defaults(c);
  p.attack_threshold_dbm = attack_dbm;
  p.failure_threshold_dbm = std::max(attack_dbm, p.failure_threshold_dbm);
  p.threshold_dispersion_dbm = 0.0;
  p.success_probability = fate == Susceptibility::Vulnerable ? 1.0 : 0.0;
  p.failure_probability = fate == Susceptibility::Fragile ? 1.0 : 0.0;
  return p;
}

CampaignResult run(const CampaignConfig& cfg, AttenuatorState s, std::uint64_t seed = 1) {
  Rng rng(seed);
  return run_campaign(cfg, std::move(s), FiberLink{}, LaserSource{}, rng);
}

}  // namespace

TEST_CASE("config validation") {
  CampaignConfig c;
  CHECK_NOTHROW(c.validate());
  c.step_dbm = 0.25;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.start_power_dbm = 40.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.dwell_s = 5.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.success_delta_db = 0.5;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("power schedule") {
  CampaignConfig c;
  const auto p = power_schedule_dbm(c, 100.0);
  CHECK(p.size() == 30);
  CHECK(p.front() == 25.0);
  CHECK(p.back() == 39.5);

  c.step_dbm = 1.0;
  const auto coarse = power_schedule_dbm(c, 100.0);
  CHECK(coarse.size() == 16);
  CHECK(coarse[14] == 39.0);
  CHECK(coarse.back() == 39.5);

  const auto capped = power_schedule_dbm(CampaignConfig{}, 30.2);
  CHECK(capped.back() == doctest::Approx(30.2));
  for (std::size_t i = 1; i < capped.size(); ++i) CHECK(capped[i] > capped[i - 1]);
}

TEST_CASE("fuse interlock") {
  CampaignConfig c;
  c.connectorized_output = true;
  CHECK(check_fuse(c, 4.5));
  CHECK(check_fuse(c, 6.0));
  CHECK_FALSE(check_fuse(c, 4.4));
  CHECK_FALSE(check_fuse(c, 0.0));
  c.connectorized_output = false;
  CHECK_FALSE(check_fuse(c, 6.8));
  CHECK_THROWS_AS(check_fuse(c, -1.0), std::invalid_argument);
}

TEST_CASE("MEMS campaign succeeds near its attack threshold") {
  const auto profile = pinned(AttenuatorClass::MemsVoa, 36.0, Susceptibility::Vulnerable);
  const auto r = run(CampaignConfig{}, new_attenuator(AttenuatorClass::MemsVoa, profile, 30.0, 4));
  CHECK(r.outcome == CampaignOutcome::Success);
  const auto& last = r.steps.back();
  CHECK(std::abs(last.power_dbm_set - 36.0) <= 0.5);
  CHECK(last.delta_db <= -1.0);
  CHECK(last.event == StepEvent::PermanentDrop);
  // Permanent: still >= 1 dB below after full cool-down.
  CHECK(attenuation_at_setpoint(cool_down(r.final_state, 86400.0)) <=
        last.attenuation_before_db - 1.0);
}

TEST_CASE("manual VOA campaign is inconclusive at full power") {
  const auto r = run(CampaignConfig{},
                     new_attenuator(AttenuatorClass::ManualVoa,
                                    DamageProfile::defaults(AttenuatorClass::ManualVoa), 31.0, 7));
  CHECK(r.outcome == CampaignOutcome::Inconclusive);
  CHECK(r.steps.size() == 30);
  CHECK(r.steps.back().power_dbm_set == 39.5);
  for (const auto& s : r.steps) CHECK(std::abs(s.delta_db) < 1.0);
}

TEST_CASE("fixed attenuator success is judged at shutoff") {
  const auto profile = pinned(AttenuatorClass::Fixed, 34.0, Susceptibility::Vulnerable);
  const auto r = run(CampaignConfig{}, new_attenuator(AttenuatorClass::Fixed, profile, 25.0, 2));
  CHECK(r.outcome == CampaignOutcome::Success);
  const auto& last = r.steps.back();
  CHECK(last.event == StepEvent::TemporaryDrop);
  CHECK(last.shutoff_delta_db <= -1.0);
  CHECK(last.delta_db > last.shutoff_delta_db);
  CHECK(success_delta_of(r) == last.shutoff_delta_db);
}

TEST_CASE("critical failures") {
  const auto fixed = pinned(AttenuatorClass::Fixed, 34.0, Susceptibility::Fragile);
  const auto rf = run(CampaignConfig{}, new_attenuator(AttenuatorClass::Fixed, fixed, 25.0, 2));
  CHECK(rf.outcome == CampaignOutcome::CriticalFailure);
  CHECK(rf.steps.back().delta_db >= 3.0);

  const auto mems = pinned(AttenuatorClass::MemsVoa, 36.2, Susceptibility::Fragile);
  const auto rm = run(CampaignConfig{}, new_attenuator(AttenuatorClass::MemsVoa, mems, 30.0, 2));
  CHECK(rm.outcome == CampaignOutcome::CriticalFailure);
  CHECK(rm.final_state.destroyed);
}

TEST_CASE("connectorized output trips the fuse") {
  CampaignConfig cfg;
  cfg.connectorized_output = true;
  // Resistant VDMC point: only the interlock can stop the run.
  const auto p = pinned(AttenuatorClass::VdmcVoa, 34.5, Susceptibility::Resistant);
  const auto r = run(cfg, new_attenuator(AttenuatorClass::VdmcVoa, p, 63.0, 3));
  CHECK(r.outcome == CampaignOutcome::FiberFuseDoS);
  CHECK(r.steps.back().event == StepEvent::FuseTrip);
  CHECK(r.steps.back().power_w_delivered >= 4.5);
  CHECK(r.steps[r.steps.size() - 2].power_w_delivered < 4.5);

  cfg.connectorized_output = false;
  const auto spliced = run(cfg, new_attenuator(AttenuatorClass::VdmcVoa, p, 63.0, 3));
  CHECK(spliced.outcome == CampaignOutcome::Inconclusive);
}

TEST_CASE("start power above the injectable limit is rejected") {
  CampaignConfig cfg;
  cfg.start_power_dbm = 30.0;
  LaserSource weak;
  weak.max_power_w = 0.5;
  Rng rng(1);
  const auto s = new_attenuator(AttenuatorClass::ManualVoa,
                                DamageProfile::defaults(AttenuatorClass::ManualVoa), 31.0, 1);
  CHECK_THROWS_AS(run_campaign(cfg, s, FiberLink{}, weak, rng), std::invalid_argument);

  // A limit between start and max caps the schedule instead.
  weak.max_power_w = 2.0;
  const auto r = run_campaign(cfg, s, FiberLink{}, weak, rng);
  for (const auto& st : r.steps) CHECK(st.power_dbm_set <= watts_to_dbm(2.0) + 1e-9);
  CHECK(r.outcome == CampaignOutcome::Inconclusive);
}

TEST_CASE("campaign invariants over random samples") {
  const CampaignConfig cfg;
  const double cap_w = std::min(dbm_to_watts(cfg.max_power_dbm),
                                max_injectable_power(FiberLink{}, LaserSource{}).power_w);
  for (auto c : {AttenuatorClass::ManualVoa, AttenuatorClass::Fixed, AttenuatorClass::MemsVoa,
                 AttenuatorClass::VdmcVoa}) {
    const double sp = c == AttenuatorClass::Fixed ? 25.0 : 30.0;
    for (std::int64_t i = 0; i < 200; ++i) {
      const auto seeds = trial_seeds(99, i);
      const auto r =
          run(cfg, new_attenuator(c, DamageProfile::defaults(c), sp, seeds.attenuator), seeds.campaign);
      REQUIRE_FALSE(r.steps.empty());
      for (std::size_t k = 0; k < r.steps.size(); ++k) {
        const auto& s = r.steps[k];
        CHECK(s.power_w_delivered <= cap_w + 1e-12);
        CHECK(s.delta_db == doctest::Approx(s.attenuation_after_db - s.attenuation_before_db));
        if (k > 0) CHECK(s.power_dbm_set > r.steps[k - 1].power_dbm_set);
      }
      const auto& last = r.steps.back();
      switch (r.outcome) {
        case CampaignOutcome::Success:
          CHECK(std::min(last.delta_db, last.shutoff_delta_db) <= cfg.success_delta_db);
          if (c != AttenuatorClass::Fixed) {
            CHECK(attenuation_at_setpoint(cool_down(r.final_state, 1e5)) <=
                  last.attenuation_before_db - 1.0);
          }
          break;
        case CampaignOutcome::CriticalFailure:
          CHECK((last.delta_db >= cfg.failure_delta_db || r.final_state.destroyed));
          break;
        case CampaignOutcome::Inconclusive:
          CHECK(last.power_dbm_set == cfg.max_power_dbm);
          break;
        case CampaignOutcome::FiberFuseDoS:
          FAIL("fuse cannot trip on a spliced output");
          break;
      }
      // Earlier steps never met a stop condition.
      for (std::size_t k = 0; k + 1 < r.steps.size(); ++k) {
        const auto& s = r.steps[k];
        CHECK(std::min(s.delta_db, s.shutoff_delta_db) > cfg.success_delta_db);
        CHECK(s.delta_db < cfg.failure_delta_db);
      }
    }
  }
}

TEST_CASE("monte carlo") {
  const CampaignConfig cfg;
  const auto profile = DamageProfile::defaults(AttenuatorClass::MemsVoa);

  SUBCASE("single trial equals that campaign") {
    const auto mc = monte_carlo(cfg, AttenuatorClass::MemsVoa, profile, 30.0, 1, 5, {}, {}, true);
    const auto seeds = trial_seeds(5, 0);
    const auto single =
        run(cfg, new_attenuator(AttenuatorClass::MemsVoa, profile, 30.0, seeds.attenuator),
            seeds.campaign);
    REQUIRE(mc.trials.size() == 1);
    CHECK(campaign_result_json(cfg, mc.trials[0]) == campaign_result_json(cfg, single));
    CHECK(mc.summary.success_rate == (single.outcome == CampaignOutcome::Success ? 1.0 : 0.0));
  }

  SUBCASE("thread count does not change results") {
    const auto a = monte_carlo(cfg, AttenuatorClass::VdmcVoa,
                               DamageProfile::defaults(AttenuatorClass::VdmcVoa), 50.0, 300, 8, {},
                               {}, false, 1);
    const auto b = monte_carlo(cfg, AttenuatorClass::VdmcVoa,
                               DamageProfile::defaults(AttenuatorClass::VdmcVoa), 50.0, 300, 8, {},
                               {}, false, 7);
    CHECK(to_json(a.summary) == to_json(b.summary));
    CHECK(a.summary.critical_failure_rate == 0.0);
  }

  CHECK_THROWS_AS(monte_carlo(cfg, AttenuatorClass::MemsVoa, profile, 30.0, 0, 1),
                  std::invalid_argument);
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}

TEST_CASE("campaign json") {
  const auto r = run(CampaignConfig{},
                     new_attenuator(AttenuatorClass::ManualVoa,
                                    DamageProfile::defaults(AttenuatorClass::ManualVoa), 31.0, 7));
  const auto j = campaign_result_json(CampaignConfig{}, r);
  CHECK(j["schema"] == 1);
  CHECK(j["outcome"] == "Inconclusive");
  CHECK(j["steps"].size() == 30);
  CHECK(j["config"]["start_power_dbm"] == 25.0);
  for (const char* key : {"power_dbm_set", "power_w_delivered", "duration_s",
                          "attenuation_before_db", "attenuation_after_db", "delta_db", "event"}) {
    CHECK(j["steps"][0].contains(key));
  }
}
