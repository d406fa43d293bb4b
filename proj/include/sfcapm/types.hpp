#pragma once

namespace sfcapm {

// Time preference and curvature of the representative agent.
// beta in (0, 1], rho >= 0.
struct Preferences {
  double beta;
  double rho;
  Preferences(double beta, double rho);
};

// Multiplicative adjustments to expected future utility: zeta scales the
// equity Euler condition, xi the risk-free one. Both strictly positive.
struct SufficiencyFactors {
  double zeta;
  double xi;
  SufficiencyFactors(double zeta, double xi);
};

// Joint lognormal law of consumption growth x and dividend growth z:
// (ln x, ln z) is bivariate normal with means (mu_x, mu_z), variances
// (var_x, var_z) and covariance cov_xz. Variances are nonnegative and
// |cov_xz| <= sqrt(var_x * var_z).
struct GrowthMoments {
  double mu_x;
  double var_x;
  double mu_z;
  double var_z;
  double cov_xz;
  GrowthMoments(double mu_x, double var_x, double mu_z, double var_z,
                double cov_xz);
  // Single-process identification z = x used by the annual pipeline.
  static GrowthMoments consumption_only(double mu, double var);
};

// Annual summary statistics of an economy, all in gross (1 + rate) form.
// Gross rates are strictly positive, sd_growth >= 0, and mean_premium
// equals mean_equity_return - risk_free_rate within 1e-12.
struct EconomySummary {
  double mean_equity_return;
  double risk_free_rate;
  double mean_growth;
  double sd_growth;
  double mean_premium;
  EconomySummary(double mean_equity_return, double risk_free_rate,
                 double mean_growth, double sd_growth);
  EconomySummary(double mean_equity_return, double risk_free_rate,
                 double mean_growth, double sd_growth, double mean_premium);
};

}  // namespace sfcapm
