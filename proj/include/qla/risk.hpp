#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

namespace qla {

// Outcomes of laser-damage testing on whole QKD systems. Denial-of-service
// outcomes are counted as tested but not compromised.
struct TestRecord {
  std::int64_t n_tested = 5;
  std::int64_t n_compromised = 4;
  std::int64_t n_dos = 1;

  void validate() const;
};

enum class Prior { Jeffreys, Uniform };

const char* to_string(Prior prior);
Prior prior_from_string(const std::string& name);

struct RiskQuery {
  TestRecord record;
  std::int64_t population_total = 50;
  double vulnerable_fraction = 0.2;
  Prior prior = Prior::Jeffreys;

  void validate() const;
};

struct BetaParams {
  double alpha;
  double beta;
};

struct RiskPosterior {
  double alpha;
  double beta;
  double prob_exceeds;
};

BetaParams posterior(const TestRecord& record, Prior prior);

// C(m,k) B(k+alpha, m-k+beta) / B(alpha, beta), evaluated with log-gamma.
double beta_binomial_pmf(std::int64_t k, std::int64_t m, double alpha, double beta);

// Count threshold used for "more than fraction f of the m untested systems":
// the predictive count must exceed floor(f * m).
std::int64_t vulnerable_count_threshold(std::int64_t untested, double fraction);

// Probability that more than floor(f * m) of the m = N - n_tested untested
// systems are vulnerable, under the beta-binomial posterior predictive.
double prob_fraction_vulnerable_exceeds(const RiskQuery& query);

// Infinite-population counterpart: P(p > f) = 1 - I_f(alpha, beta).
double prob_fraction_exceeds_infinite(const RiskQuery& query);

RiskPosterior evaluate_risk(const RiskQuery& query);

nlohmann::json risk_report_json(const RiskQuery& query);

}  // namespace qla
