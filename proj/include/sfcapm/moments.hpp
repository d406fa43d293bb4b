#pragma once

#include <optional>
#include <vector>

#include "sfcapm/types.hpp"

namespace sfcapm {

// Annual observations in time order. consumption is required and strictly
// positive. Optional columns, when present, match its length; dividends and
// gross returns are strictly positive. periods is either empty (labels
// default to 0..n-1) or a strictly increasing label per row.
struct AnnualSeries {
  std::vector<long long> periods;
  std::vector<double> consumption;
  std::optional<std::vector<double>> equity_return;
  std::optional<std::vector<double>> risk_free_return;
  std::optional<std::vector<double>> dividends;

  void validate() const;
};

enum class VarianceDivisor { population, sample };

// Log-growth moments from level series: ratios c[t+1]/c[t], their logs, and
// mean/variance/covariance with the chosen divisor (population n by
// default). Without a dividends column the z process is identified with x.
GrowthMoments estimate_moments(
    const AnnualSeries& series,
    VarianceDivisor divisor = VarianceDivisor::population);

// Lognormal parameters implied by a gross growth mean and standard
// deviation: var = ln(1 + (sd/mean)^2), mu = ln(mean) - var/2.
struct LognormalParams {
  double mu;
  double var;
};
LognormalParams moments_from_summary(double mean_growth, double sd_growth);

// Arithmetic summary of a series carrying both return columns: mean gross
// equity return, mean gross risk-free rate, mean and standard deviation of
// gross consumption growth, and their premium.
EconomySummary summarize(const AnnualSeries& series,
                         VarianceDivisor divisor = VarianceDivisor::population);

// Builtin 1889-1978 U.S. annual statistics: E[R_e] = 1.0698, R_f = 1.008,
// E[x] = 1.018, sd[x] = 0.036.
EconomySummary us_economy_1889_1978();

}  // namespace sfcapm
