#pragma once

#include <cstdint>
#include <vector>

#include "sfcapm/types.hpp"

namespace sfcapm {

enum class RunMode { serial, parallel };

// Monte-Carlo configuration. chunk is the unit of parallel work and of
// deterministic accumulation order; it must divide draws exactly.
struct SimulationConfig {
  GrowthMoments moments;
  Preferences prefs;
  SufficiencyFactors factors;
  std::uint64_t draws;
  std::uint64_t seed;
  std::uint64_t chunk;
  SimulationConfig(const GrowthMoments& moments, const Preferences& prefs,
                   const SufficiencyFactors& factors, std::uint64_t draws,
                   std::uint64_t seed, std::uint64_t chunk);
};

// Default chunk size: the largest power of two up to 65536 that divides
// draws, or draws itself (one chunk) when none does.
std::uint64_t automatic_chunk(std::uint64_t draws);

// Jointly lognormal growth draws. Draw i depends only on (seed, i), so
// paths are reproducible and independent of evaluation order; z equals x
// bitwise when the moments identify the two processes.
struct GrowthPaths {
  std::vector<double> x;
  std::vector<double> z;
};
GrowthPaths simulate_growth(const SimulationConfig& config);

// Running power sums of consumption growth over a set of draws. The eight
// sums cover every moment the pricing statistics and their delta-method
// standard errors need: exponents 1, 2, 1-rho, 2-2rho, -rho, -2rho, 2-rho
// and 1-2rho.
struct SampleSums {
  std::uint64_t count = 0;
  double x = 0;   // sum x
  double xx = 0;  // sum x^2
  double p = 0;   // sum x^(1-rho)
  double pp = 0;  // sum x^(2-2rho)
  double m = 0;   // sum x^(-rho)
  double mm = 0;  // sum x^(-2rho)
  double xp = 0;  // sum x^(2-rho)
  double pm = 0;  // sum x^(1-2rho)

  SampleSums& operator+=(const SampleSums& other);
};

// Sums over draws [chunk_index*chunk, chunk_index*chunk + chunk). Both run
// modes call exactly this function and merge partials in chunk-index order,
// which makes serial and parallel totals bit-identical.
SampleSums accumulate_chunk(const SimulationConfig& config,
                            std::uint64_t chunk_index);

SampleSums collect_sums(const SimulationConfig& config,
                        RunMode mode = RunMode::parallel);

struct MeanEstimate {
  double value = 0;
  double std_error = 0;
};

// Whether the price-dividend ratio entering a statistic comes from the
// sample itself (making identities exact) or from the closed form (making
// the statistic an estimate with a standard error).
enum class PriceSource { sample, closed_form };

// Sampled pricing statistics with delta-method standard errors.
struct SimulationReport {
  std::uint64_t draws = 0;
  MeanEstimate growth;          // mean of x
  MeanEstimate growth_power;    // mean of x^(1-rho)
  MeanEstimate discount_power;  // mean of x^(-rho)
  double price_dividend_sample = 0;  // v from the sampled mean of x^(1-rho)
  MeanEstimate equity_return;        // mean(x) / k, i.e. ((v+1)/v) mean(x)
  MeanEstimate risk_free;            // 1 / (beta xi mean(x^(-rho)))
  double euler_residual_sample = 0;  // |beta zeta mean(x^(-rho) R_e) - 1|, sampled v
  MeanEstimate euler_residual_closed;  // same residual with closed-form v
  double central_gap_sample = 0;       // central pricing identity, sampled prices
  MeanEstimate central_gap_closed;     // same gap with closed-form prices
};
SimulationReport build_report(const SimulationConfig& config,
                              const SampleSums& sums);
SimulationReport run_simulation(const SimulationConfig& config,
                                RunMode mode = RunMode::parallel);

// Sampled expected equity return mean(x) / k with k from the sampled mean
// of x^(1-rho). Throws domain_error when the sampled k >= 1.
MeanEstimate mc_equity_return(const SimulationConfig& config,
                              RunMode mode = RunMode::parallel);

// |beta zeta mean(x^(-rho) R_e) - 1| where R_e = ((v+1)/v) x. With the
// sampled v this is an algebraic identity (zero to rounding); with the
// closed-form v it is an estimate reported with its standard error.
MeanEstimate euler_residual(const SimulationConfig& config,
                            PriceSource source = PriceSource::sample,
                            RunMode mode = RunMode::parallel);
double euler_residual_with_price(const SampleSums& sums, double beta,
                                 double zeta, double price_dividend_ratio);

// Gap of the central pricing identity
// xi R_f - zeta E[R_e] - beta zeta xi R_f cov(x^(-rho), R_e), with the
// sampled covariance (population divisor). In-sample prices make the gap
// exactly zero up to rounding; closed-form prices give an estimate.
MeanEstimate central_pricing_check(const SimulationConfig& config,
                                   PriceSource source = PriceSource::sample,
                                   RunMode mode = RunMode::parallel);

}  // namespace sfcapm
