#include "qla/risk.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <stdexcept>

namespace qla {

void TestRecord::validate() const {
  if (n_tested < 0 || n_compromised < 0 || n_dos < 0) {
    throw std::invalid_argument("test counts must be non-negative");
  }
  if (n_compromised + n_dos > n_tested) {
    throw std::invalid_argument("compromised + denial-of-service exceeds tested count");
  }
}

void RiskQuery::validate() const {
  record.validate();
  if (population_total < record.n_tested) {
    throw std::invalid_argument("population is smaller than the number of tested systems");
  }
  if (!(vulnerable_fraction > 0.0 && vulnerable_fraction <= 1.0)) {
    throw std::invalid_argument("vulnerable fraction must be in (0, 1]");
  }
}

const char* to_string(Prior prior) {
  return prior == Prior::Jeffreys ? "jeffreys" : "uniform";
}

Prior prior_from_string(const std::string& name) {
  if (name == "jeffreys") return Prior::Jeffreys;
  if (name == "uniform") return Prior::Uniform;
  throw std::invalid_argument("unknown prior '" + name + "'");
}

BetaParams posterior(const TestRecord& record, Prior prior) {
  record.validate();
  const double a0 = prior == Prior::Jeffreys ? 0.5 : 1.0;
  return {a0 + static_cast<double>(record.n_compromised),
          a0 + static_cast<double>(record.n_tested - record.n_compromised)};
}

double beta_binomial_pmf(std::int64_t k, std::int64_t m, double alpha, double beta) {
  if (m < 0 || k < 0 || k > m) throw std::domain_error("beta_binomial_pmf: need 0 <= k <= m");
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw std::domain_error("beta_binomial_pmf: alpha and beta must be > 0");
  }
  const double kd = static_cast<double>(k);
  const double md = static_cast<double>(m);
  const double log_choose = std::lgamma(md + 1) - std::lgamma(kd + 1) - std::lgamma(md - kd + 1);
  const double log_b_post = std::lgamma(kd + alpha) + std::lgamma(md - kd + beta) -
                            std::lgamma(md + alpha + beta);
  const double log_b_prior = std::lgamma(alpha) + std::lgamma(beta) - std::lgamma(alpha + beta);
  return std::exp(log_choose + log_b_post - log_b_prior);
}

std::int64_t vulnerable_count_threshold(std::int64_t untested, double fraction) {
  // Nudge before flooring so that e.g. 0.2 * 45 lands on 9, not 8.999...
  return static_cast<std::int64_t>(std::floor(fraction * static_cast<double>(untested) + 1e-9));
}

double prob_fraction_vulnerable_exceeds(const RiskQuery& query) {
  query.validate();
  const auto [alpha, beta] = posterior(query.record, query.prior);
  const std::int64_t m = query.population_total - query.record.n_tested;
  const std::int64_t threshold = vulnerable_count_threshold(m, query.vulnerable_fraction);

  // Sum whichever tail is shorter.
  double upper = 0.0;
  if (m - threshold <= threshold + 1) {
    for (std::int64_t k = threshold + 1; k <= m; ++k) upper += beta_binomial_pmf(k, m, alpha, beta);
  } else {
    double lower = 0.0;
    for (std::int64_t k = 0; k <= threshold; ++k) lower += beta_binomial_pmf(k, m, alpha, beta);
    upper = 1.0 - lower;
  }
  if (upper < 0.0) return 0.0;
  if (upper > 1.0) return 1.0;
  return upper;
}

double prob_fraction_exceeds_infinite(const RiskQuery& query) {
  query.validate();
  const auto [alpha, beta] = posterior(query.record, query.prior);
  if (query.vulnerable_fraction >= 1.0) return 0.0;
  return boost::math::ibetac(alpha, beta, query.vulnerable_fraction);
}

RiskPosterior evaluate_risk(const RiskQuery& query) {
  const auto [alpha, beta] = posterior(query.record, query.prior);
  return {alpha, beta, prob_fraction_vulnerable_exceeds(query)};
}

nlohmann::json risk_report_json(const RiskQuery& query) {
  const RiskPosterior post = evaluate_risk(query);
  const std::int64_t m = query.population_total - query.record.n_tested;
  return {
      {"schema", 1},
      {"record",
       {{"n_tested", query.record.n_tested},
        {"n_compromised", query.record.n_compromised},
        {"n_dos", query.record.n_dos}}},
      {"prior", to_string(query.prior)},
      {"alpha", post.alpha},
      {"beta", post.beta},
      {"population_total", query.population_total},
      {"untested", m},
      {"vulnerable_fraction", query.vulnerable_fraction},
      {"boundary_convention", "count > floor(fraction * untested)"},
      {"count_threshold", vulnerable_count_threshold(m, query.vulnerable_fraction)},
      {"prob_exceeds", post.prob_exceeds},
      {"prob_exceeds_infinite_population", prob_fraction_exceeds_infinite(query)},
  };
}

}  // namespace qla
