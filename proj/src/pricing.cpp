#include "sfcapm/pricing.hpp"

#include <cmath>
#include <sstream>

#include "sfcapm/errors.hpp"

namespace sfcapm {

UtilityValue crra_utility(double consumption, double rho) {
  if (!(consumption > 0.0))
    throw domain_error("crra_utility: consumption must be positive");
  if (!(rho >= 0.0)) throw domain_error("crra_utility: rho must be nonnegative");
  const double marginal = std::pow(consumption, -rho);
  if (rho == 1.0) return {std::log(consumption), marginal};
  return {std::pow(consumption, 1.0 - rho) / (1.0 - rho), marginal};
}

double lognormal_power_mean(double mu, double var, double a) {
  if (!(var >= 0.0))
    throw domain_error("lognormal_power_mean: variance must be nonnegative");
  return std::exp(a * mu + 0.5 * a * a * var);
}

namespace {

// k = beta zeta E[x^(1-rho)], the growth factor of the price recursion.
double price_growth_factor(const Preferences& prefs, double zeta,
                           const GrowthMoments& m) {
  if (!(zeta > 0.0)) throw domain_error("pricing: zeta must be positive");
  return prefs.beta * zeta *
         lognormal_power_mean(m.mu_x, m.var_x, 1.0 - prefs.rho);
}

}  // namespace

double price_dividend_ratio(const Preferences& prefs, double zeta,
                            const GrowthMoments& moments) {
  const double k = price_growth_factor(prefs, zeta, moments);
  if (k >= 1.0) {
    std::ostringstream msg;
    msg << "price_dividend_ratio: no finite equilibrium price, "
        << "beta*zeta*E[x^(1-rho)] = " << k << " >= 1";
    throw domain_error(msg.str());
  }
  return k / (1.0 - k);
}

double expected_equity_return(const Preferences& prefs, double zeta,
                              const GrowthMoments& moments) {
  return lognormal_power_mean(moments.mu_x, moments.var_x, 1.0) /
         price_growth_factor(prefs, zeta, moments);
}

double risk_free_rate(const Preferences& prefs, double xi,
                      const GrowthMoments& moments) {
  if (!(xi > 0.0)) throw domain_error("pricing: xi must be positive");
  return 1.0 / (prefs.beta * xi *
                lognormal_power_mean(moments.mu_x, moments.var_x, -prefs.rho));
}

double log_equity_premium(double zeta, double xi, double rho, double var_x) {
  if (!(zeta > 0.0) || !(xi > 0.0))
    throw domain_error("log_equity_premium: factors must be positive");
  if (!(var_x >= 0.0))
    throw domain_error("log_equity_premium: variance must be nonnegative");
  return std::log(xi) - std::log(zeta) + rho * var_x;
}

}  // namespace sfcapm
