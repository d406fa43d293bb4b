#pragma once

#include "sfcapm/types.hpp"

namespace sfcapm {

// Utility level and marginal utility under constant relative risk aversion:
// u(c) = c^(1-rho) / (1-rho), with u(c) = ln c at rho = 1. The marginal
// utility c^(-rho) is continuous across rho = 1.
struct UtilityValue {
  double utility;
  double marginal;
};
UtilityValue crra_utility(double consumption, double rho);

// E[g^a] for ln g ~ N(mu, var): exp(a mu + a^2 var / 2). Requires var >= 0.
double lognormal_power_mean(double mu, double var, double a);

// Equilibrium price-dividend ratio v = k / (1 - k) with
// k = beta zeta E[x^(1-rho)]. Throws domain_error when k >= 1: the price
// series diverges and no finite equilibrium price exists.
double price_dividend_ratio(const Preferences& prefs, double zeta,
                            const GrowthMoments& moments);

// Unconditional expected gross equity return E[x] / (beta zeta E[x^(1-rho)]),
// identical to ((v+1)/v) E[x].
double expected_equity_return(const Preferences& prefs, double zeta,
                              const GrowthMoments& moments);

// Gross risk-free rate 1 / (beta xi E[x^(-rho)]).
double risk_free_rate(const Preferences& prefs, double xi,
                      const GrowthMoments& moments);

// Unconditional log premium ln E[R_e] - ln R_f, which reduces to
// ln xi - ln zeta + rho var_x when dividend growth is identified with
// consumption growth.
double log_equity_premium(double zeta, double xi, double rho, double var_x);

}  // namespace sfcapm
