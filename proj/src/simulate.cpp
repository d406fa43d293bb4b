#include "sfcapm/simulate.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "sfcapm/errors.hpp"
#include "sfcapm/philox.hpp"
#include "sfcapm/pricing.hpp"

namespace sfcapm {

SimulationConfig::SimulationConfig(const GrowthMoments& moments_,
                                   const Preferences& prefs_,
                                   const SufficiencyFactors& factors_,
                                   std::uint64_t draws_, std::uint64_t seed_,
                                   std::uint64_t chunk_)
    : moments(moments_),
      prefs(prefs_),
      factors(factors_),
      draws(draws_),
      seed(seed_),
      chunk(chunk_) {
  if (draws == 0)
    throw domain_error("SimulationConfig: draws must be positive");
  if (chunk == 0 || draws % chunk != 0)
    throw domain_error("SimulationConfig: chunk must divide draws exactly");
}

std::uint64_t automatic_chunk(std::uint64_t draws) {
  std::uint64_t best = 1;
  for (std::uint64_t candidate = 2; candidate <= 65536; candidate *= 2) {
    if (draws % candidate == 0) best = candidate;
  }
  return best > 1 ? best : draws;
}

GrowthPaths simulate_growth(const SimulationConfig& config) {
  const GrowthMoments& m = config.moments;
  const double sd_x = std::sqrt(m.var_x);
  // When the moments identify z with x, copy the value instead of rebuilding
  // it from a Cholesky factor, so the identification is exact bitwise.
  const bool shared =
      m.mu_z == m.mu_x && m.var_z == m.var_x && m.cov_xz == m.var_x;
  double slope = 0.0;
  double residual_sd = 0.0;
  if (!shared) {
    slope = m.var_x > 0.0 ? m.cov_xz / sd_x : 0.0;
    const double remainder = m.var_z - slope * slope;
    if (remainder < -1e-9 * std::max(m.var_z, 1.0))
      throw domain_error(
          "simulate_growth: covariance matrix is not positive semidefinite");
    residual_sd = std::sqrt(std::max(remainder, 0.0));
  }
  GrowthPaths paths;
  paths.x.resize(config.draws);
  paths.z.resize(config.draws);
  for (std::uint64_t i = 0; i < config.draws; ++i) {
    const GaussPair g = normal_pair(config.seed, i);
    paths.x[i] = std::exp(m.mu_x + sd_x * g.z0);
    paths.z[i] = shared
                     ? paths.x[i]
                     : std::exp(m.mu_z + slope * g.z0 + residual_sd * g.z1);
  }
  return paths;
}

SampleSums& SampleSums::operator+=(const SampleSums& other) {
  count += other.count;
  x += other.x;
  xx += other.xx;
  p += other.p;
  pp += other.pp;
  m += other.m;
  mm += other.mm;
  xp += other.xp;
  pm += other.pm;
  return *this;
}

SampleSums accumulate_chunk(const SimulationConfig& config,
                            std::uint64_t chunk_index) {
  const double mu = config.moments.mu_x;
  const double sd = std::sqrt(config.moments.var_x);
  const double power = 1.0 - config.prefs.rho;
  SampleSums sums;
  const std::uint64_t begin = chunk_index * config.chunk;
  const std::uint64_t end = begin + config.chunk;
  for (std::uint64_t i = begin; i < end; ++i) {
    const GaussPair g = normal_pair(config.seed, i);
    const double log_x = mu + sd * g.z0;
    const double x = std::exp(log_x);
    const double p = std::exp(power * log_x);  // x^(1-rho)
    const double m = p / x;                    // x^(-rho)
    sums.x += x;
    sums.xx += x * x;
    sums.p += p;
    sums.pp += p * p;
    sums.m += m;
    sums.mm += m * m;
    sums.xp += p * x;
    sums.pm += p * m;
  }
  sums.count = config.chunk;
  return sums;
}

namespace {

SampleSums merge_in_order(const std::vector<SampleSums>& partials) {
  SampleSums total;
  for (const SampleSums& part : partials) total += part;
  return total;
}

}  // namespace

SampleSums collect_sums(const SimulationConfig& config, RunMode mode) {
  const std::uint64_t chunks = config.draws / config.chunk;
  std::vector<SampleSums> partials(chunks);
  if (mode == RunMode::serial) {
    for (std::uint64_t c = 0; c < chunks; ++c)
      partials[c] = accumulate_chunk(config, c);
  } else {
    const std::int64_t n = static_cast<std::int64_t>(chunks);
#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < n; ++c)
      partials[static_cast<std::size_t>(c)] =
          accumulate_chunk(config, static_cast<std::uint64_t>(c));
  }
  return merge_in_order(partials);
}

namespace {

// Variance of the sample mean with the n-1 correction; zero for a single
// draw, where the estimator is undefined but the report must stay finite.
double variance_of_mean(double sum, double sum_sq, std::uint64_t n) {
  if (n < 2) return 0.0;
  const double mean = sum / static_cast<double>(n);
  const double population = sum_sq / static_cast<double>(n) - mean * mean;
  return std::max(population, 0.0) / static_cast<double>(n - 1);
}

double covariance_of_means(double sum_ab, double sum_a, double sum_b,
                           std::uint64_t n) {
  if (n < 2) return 0.0;
  const double population =
      sum_ab / static_cast<double>(n) -
      (sum_a / static_cast<double>(n)) * (sum_b / static_cast<double>(n));
  return population / static_cast<double>(n - 1);
}

}  // namespace

double euler_residual_with_price(const SampleSums& sums, double beta,
                                 double zeta, double price_dividend_ratio) {
  if (sums.count == 0)
    throw domain_error("euler_residual_with_price: empty sample");
  if (!(price_dividend_ratio > 0.0))
    throw domain_error(
        "euler_residual_with_price: price-dividend ratio must be positive");
  const double mean_p = sums.p / static_cast<double>(sums.count);
  const double cash_flow =
      (price_dividend_ratio + 1.0) / price_dividend_ratio;
  return std::abs(beta * zeta * cash_flow * mean_p - 1.0);
}

SimulationReport build_report(const SimulationConfig& config,
                              const SampleSums& sums) {
  if (sums.count == 0) throw domain_error("build_report: empty sample");
  const std::uint64_t n = sums.count;
  const double beta = config.prefs.beta;
  const double zeta = config.factors.zeta;
  const double xi = config.factors.xi;
  const double mean_x = sums.x / static_cast<double>(n);
  const double mean_p = sums.p / static_cast<double>(n);
  const double mean_m = sums.m / static_cast<double>(n);
  const double var_mean_x = variance_of_mean(sums.x, sums.xx, n);
  const double var_mean_p = variance_of_mean(sums.p, sums.pp, n);
  const double var_mean_m = variance_of_mean(sums.m, sums.mm, n);
  const double cov_xp = covariance_of_means(sums.xp, sums.x, sums.p, n);
  // x * x^(-rho) = x^(1-rho), so the cross sum for (x, x^(-rho)) is sums.p.
  const double cov_xm = covariance_of_means(sums.p, sums.x, sums.m, n);
  const double cov_pm = covariance_of_means(sums.pm, sums.p, sums.m, n);

  SimulationReport report;
  report.draws = n;
  report.growth = {mean_x, std::sqrt(var_mean_x)};
  report.growth_power = {mean_p, std::sqrt(var_mean_p)};
  report.discount_power = {mean_m, std::sqrt(var_mean_m)};

  const double k = beta * zeta * mean_p;
  if (k >= 1.0) {
    std::ostringstream msg;
    msg << "build_report: sampled beta*zeta*mean(x^(1-rho)) = " << k
        << " >= 1, no finite equilibrium price";
    throw domain_error(msg.str());
  }
  const double v = k / (1.0 - k);
  report.price_dividend_sample = v;
  const double cash_flow = (v + 1.0) / v;

  // mean(x)/k is ((v+1)/v)*mean(x) algebraically; the direct ratio keeps
  // degenerate identities (rho = 0, zeta = beta = 1) exact to the bit.
  report.equity_return.value = mean_x / k;
  {
    // Delta method for mean(x) / (beta zeta mean(x^(1-rho))).
    const double d_x = cash_flow;
    const double d_p = -mean_x / (beta * zeta * mean_p * mean_p);
    report.equity_return.std_error =
        std::sqrt(std::max(d_x * d_x * var_mean_x + 2.0 * d_x * d_p * cov_xp +
                               d_p * d_p * var_mean_p,
                           0.0));
  }
  report.risk_free.value = 1.0 / (beta * xi * mean_m);
  report.risk_free.std_error =
      std::sqrt(var_mean_m) / (beta * xi * mean_m * mean_m);

  report.euler_residual_sample = euler_residual_with_price(sums, beta, zeta, v);

  const double v_closed = price_dividend_ratio(config.prefs, zeta, config.moments);
  const double cash_closed = (v_closed + 1.0) / v_closed;
  report.euler_residual_closed.value =
      std::abs(beta * zeta * cash_closed * mean_p - 1.0);
  report.euler_residual_closed.std_error =
      beta * zeta * cash_closed * std::sqrt(var_mean_p);

  // Central pricing identity with the sampled covariance (population
  // divisor): exact in-sample because E(XY) = E(X)E(Y) + cov(X, Y) holds as
  // an identity under the same sample.
  {
    const double rf = report.risk_free.value;
    const double cov_population = mean_p - mean_m * mean_x;
    const double cov_with_return = cash_flow * cov_population;
    report.central_gap_sample = xi * rf - zeta * report.equity_return.value -
                                beta * zeta * xi * rf * cov_with_return;
  }
  {
    const double rf = risk_free_rate(config.prefs, xi, config.moments);
    const double scale = beta * zeta * xi * rf * cash_closed;
    report.central_gap_closed.value =
        xi * rf - zeta * cash_closed * mean_x -
        scale * (mean_p - mean_m * mean_x);
    const double d_x = -zeta * cash_closed + scale * mean_m;
    const double d_p = -scale;
    const double d_m = scale * mean_x;
    const double variance =
        d_x * d_x * var_mean_x + d_p * d_p * var_mean_p +
        d_m * d_m * var_mean_m + 2.0 * d_x * d_p * cov_xp +
        2.0 * d_x * d_m * cov_xm + 2.0 * d_p * d_m * cov_pm;
    report.central_gap_closed.std_error = std::sqrt(std::max(variance, 0.0));
  }
  return report;
}

SimulationReport run_simulation(const SimulationConfig& config, RunMode mode) {
  return build_report(config, collect_sums(config, mode));
}

MeanEstimate mc_equity_return(const SimulationConfig& config, RunMode mode) {
  return run_simulation(config, mode).equity_return;
}

MeanEstimate euler_residual(const SimulationConfig& config, PriceSource source,
                            RunMode mode) {
  const SimulationReport report = run_simulation(config, mode);
  if (source == PriceSource::sample)
    return {report.euler_residual_sample, 0.0};
  return report.euler_residual_closed;
}

MeanEstimate central_pricing_check(const SimulationConfig& config,
                                   PriceSource source, RunMode mode) {
  const SimulationReport report = run_simulation(config, mode);
  if (source == PriceSource::sample) return {report.central_gap_sample, 0.0};
  return report.central_gap_closed;
}

}  // namespace sfcapm
