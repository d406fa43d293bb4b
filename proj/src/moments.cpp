#include "sfcapm/moments.hpp"

#include <cmath>
#include <sstream>

#include "sfcapm/errors.hpp"

namespace sfcapm {
namespace {

void check_positive(const std::vector<double>& values, const char* column) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0)) {
      std::ostringstream msg;
      msg << column << " must be positive at row " << i + 1 << " (value "
          << values[i] << ")";
      throw domain_error(msg.str());
    }
  }
}

double divisor_count(std::size_t n, VarianceDivisor divisor) {
  if (divisor == VarianceDivisor::sample && n < 2)
    throw domain_error(
        "sample variance divisor needs at least two growth observations");
  return divisor == VarianceDivisor::population ? static_cast<double>(n)
                                                : static_cast<double>(n - 1);
}

double mean(const std::vector<double>& v) {
  double sum = 0.0;
  for (double value : v) sum += value;
  return sum / static_cast<double>(v.size());
}

double central_second_moment(const std::vector<double>& v, double center,
                             double divisor) {
  double sum = 0.0;
  for (double value : v) sum += (value - center) * (value - center);
  return sum / divisor;
}

}  // namespace

void AnnualSeries::validate() const {
  const std::size_t n = consumption.size();
  if (n < 2) throw data_error("series needs at least two observations");
  if (!periods.empty()) {
    if (periods.size() != n)
      throw data_error("period labels and consumption differ in length");
    for (std::size_t i = 1; i < periods.size(); ++i)
      if (periods[i] <= periods[i - 1])
        throw data_error("period labels must be strictly increasing");
  }
  auto check_length = [n](const auto& column, const char* name) {
    if (column && column->size() != n) {
      throw data_error(std::string(name) +
                       " column length differs from consumption");
    }
  };
  check_length(equity_return, "equity_return");
  check_length(risk_free_return, "rf_return");
  check_length(dividends, "dividends");
  check_positive(consumption, "consumption");
  if (dividends) check_positive(*dividends, "dividends");
  if (equity_return) check_positive(*equity_return, "equity_return");
  if (risk_free_return) check_positive(*risk_free_return, "rf_return");
}

GrowthMoments estimate_moments(const AnnualSeries& series,
                               VarianceDivisor divisor) {
  series.validate();
  const std::size_t n = series.consumption.size() - 1;
  std::vector<double> log_growth_x(n);
  for (std::size_t i = 0; i < n; ++i)
    log_growth_x[i] = std::log(series.consumption[i + 1] / series.consumption[i]);
  const double div = divisor_count(n, divisor);
  const double mu_x = mean(log_growth_x);
  const double var_x = central_second_moment(log_growth_x, mu_x, div);
  if (!series.dividends) return GrowthMoments::consumption_only(mu_x, var_x);

  std::vector<double> log_growth_z(n);
  for (std::size_t i = 0; i < n; ++i)
    log_growth_z[i] =
        std::log((*series.dividends)[i + 1] / (*series.dividends)[i]);
  const double mu_z = mean(log_growth_z);
  const double var_z = central_second_moment(log_growth_z, mu_z, div);
  double cov = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    cov += (log_growth_x[i] - mu_x) * (log_growth_z[i] - mu_z);
  cov /= div;
  return GrowthMoments(mu_x, var_x, mu_z, var_z, cov);
}

LognormalParams moments_from_summary(double mean_growth, double sd_growth) {
  if (!(mean_growth > 0.0))
    throw domain_error("moments_from_summary: mean growth must be positive");
  if (!(sd_growth >= 0.0))
    throw domain_error(
        "moments_from_summary: standard deviation must be nonnegative");
  const double ratio = sd_growth / mean_growth;
  const double var = std::log1p(ratio * ratio);
  return {std::log(mean_growth) - 0.5 * var, var};
}

EconomySummary summarize(const AnnualSeries& series, VarianceDivisor divisor) {
  series.validate();
  if (!series.equity_return)
    throw data_error("summarize: missing required column equity_return");
  if (!series.risk_free_return)
    throw data_error("summarize: missing required column rf_return");
  const std::size_t n = series.consumption.size() - 1;
  std::vector<double> growth(n);
  for (std::size_t i = 0; i < n; ++i)
    growth[i] = series.consumption[i + 1] / series.consumption[i];
  const double mean_growth = mean(growth);
  const double sd_growth = std::sqrt(
      central_second_moment(growth, mean_growth, divisor_count(n, divisor)));
  return EconomySummary(mean(*series.equity_return),
                        mean(*series.risk_free_return), mean_growth, sd_growth);
}

EconomySummary us_economy_1889_1978() {
  return EconomySummary(1.0698, 1.008, 1.018, 0.036);
}

}  // namespace sfcapm
