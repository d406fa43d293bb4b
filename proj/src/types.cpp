#include "sfcapm/types.hpp"

#include <cmath>

#include "sfcapm/errors.hpp"

namespace sfcapm {
namespace {

void require(bool ok, const char* what) {
  if (!ok) throw domain_error(what);
}

}  // namespace

Preferences::Preferences(double beta_, double rho_) : beta(beta_), rho(rho_) {
  require(std::isfinite(beta) && beta > 0.0 && beta <= 1.0,
          "Preferences: beta must lie in (0, 1]");
  require(std::isfinite(rho) && rho >= 0.0,
          "Preferences: rho must be nonnegative");
}

SufficiencyFactors::SufficiencyFactors(double zeta_, double xi_)
    : zeta(zeta_), xi(xi_) {
  require(std::isfinite(zeta) && zeta > 0.0,
          "SufficiencyFactors: zeta must be positive");
  require(std::isfinite(xi) && xi > 0.0,
          "SufficiencyFactors: xi must be positive");
}

GrowthMoments::GrowthMoments(double mu_x_, double var_x_, double mu_z_,
                             double var_z_, double cov_xz_)
    : mu_x(mu_x_), var_x(var_x_), mu_z(mu_z_), var_z(var_z_), cov_xz(cov_xz_) {
  require(std::isfinite(mu_x) && std::isfinite(mu_z),
          "GrowthMoments: means must be finite");
  require(std::isfinite(var_x) && var_x >= 0.0,
          "GrowthMoments: var_x must be nonnegative");
  require(std::isfinite(var_z) && var_z >= 0.0,
          "GrowthMoments: var_z must be nonnegative");
  // Cauchy-Schwarz with a relative slack of 1e-12 so covariances estimated
  // in floating point pass at equality (the z = x identification).
  const double bound = std::sqrt(var_x * var_z);
  require(std::isfinite(cov_xz) &&
              std::abs(cov_xz) <= bound + 1e-12 * std::max(1.0, bound),
          "GrowthMoments: |cov_xz| must not exceed sqrt(var_x * var_z)");
}

GrowthMoments GrowthMoments::consumption_only(double mu, double var) {
  return GrowthMoments(mu, var, mu, var, var);
}

namespace {

void validate_summary(double re, double rf, double growth, double sd) {
  require(std::isfinite(re) && re > 0.0,
          "EconomySummary: mean_equity_return must be positive");
  require(std::isfinite(rf) && rf > 0.0,
          "EconomySummary: risk_free_rate must be positive");
  require(std::isfinite(growth) && growth > 0.0,
          "EconomySummary: mean_growth must be positive");
  require(std::isfinite(sd) && sd >= 0.0,
          "EconomySummary: sd_growth must be nonnegative");
}

}  // namespace

EconomySummary::EconomySummary(double mean_equity_return_,
                               double risk_free_rate_, double mean_growth_,
                               double sd_growth_)
    : mean_equity_return(mean_equity_return_),
      risk_free_rate(risk_free_rate_),
      mean_growth(mean_growth_),
      sd_growth(sd_growth_),
      mean_premium(mean_equity_return_ - risk_free_rate_) {
  validate_summary(mean_equity_return, risk_free_rate, mean_growth, sd_growth);
}

EconomySummary::EconomySummary(double mean_equity_return_,
                               double risk_free_rate_, double mean_growth_,
                               double sd_growth_, double mean_premium_)
    : mean_equity_return(mean_equity_return_),
      risk_free_rate(risk_free_rate_),
      mean_growth(mean_growth_),
      sd_growth(sd_growth_),
      mean_premium(mean_premium_) {
  validate_summary(mean_equity_return, risk_free_rate, mean_growth, sd_growth);
  require(std::abs(mean_premium - (mean_equity_return - risk_free_rate)) <=
              1e-12,
          "EconomySummary: mean_premium must equal the return difference");
}

}  // namespace sfcapm
