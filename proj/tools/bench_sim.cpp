// Benchmark of the Monte-Carlo accumulation kernel: serial reference driver
// against the OpenMP driver on the same configuration, with a bitwise
// comparison of every accumulated sum. Exit status 1 if the totals differ.

#include <CLI11.hpp>

#include <bit>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "sfcapm/simulate.hpp"
#include "sfcapm/types.hpp"

namespace {

double seconds_for(const sfcapm::SimulationConfig& config,
                   sfcapm::RunMode mode, sfcapm::SampleSums& sums) {
  const auto start = std::chrono::steady_clock::now();
  sums = sfcapm::collect_sums(config, mode);
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(stop - start).count();
}

bool same_bits(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

bool identical(const sfcapm::SampleSums& a, const sfcapm::SampleSums& b) {
  return a.count == b.count && same_bits(a.x, b.x) && same_bits(a.xx, b.xx) &&
         same_bits(a.p, b.p) && same_bits(a.pp, b.pp) && same_bits(a.m, b.m) &&
         same_bits(a.mm, b.mm) && same_bits(a.xp, b.xp) &&
         same_bits(a.pm, b.pm);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte-Carlo kernel benchmark: serial vs parallel driver"};
  std::uint64_t draws = 8000000;
  std::uint64_t chunk = 0;  // 0 selects the automatic chunk size
  std::uint64_t seed = 42;
  double beta = 0.99;
  double rho = 1.033526;
  double zeta = 0.961745;
  double xi = 1.019392;
  double mu = 0.017215021714207007;
  double var = 0.0012497928282480212;
  int repeats = 3;
  app.add_option("--draws", draws, "Sample size");
  app.add_option("--chunk", chunk,
                 "Draws per chunk (must divide draws; 0 = auto)");
  app.add_option("--seed", seed, "RNG seed");
  app.add_option("--beta", beta, "Subjective discount factor");
  app.add_option("--rho", rho, "Relative risk aversion");
  app.add_option("--zeta", zeta, "Equity sufficiency factor");
  app.add_option("--xi", xi, "Risk-free sufficiency factor");
  app.add_option("--mu", mu, "Log-growth mean");
  app.add_option("--var", var, "Log-growth variance");
  app.add_option("--repeats", repeats, "Timed repetitions per driver");
  CLI11_PARSE(app, argc, argv);

  try {
    if (chunk == 0) chunk = sfcapm::automatic_chunk(draws);
    const sfcapm::SimulationConfig config(
        sfcapm::GrowthMoments::consumption_only(mu, var),
        sfcapm::Preferences(beta, rho), sfcapm::SufficiencyFactors(zeta, xi),
        draws, seed, chunk);

    int threads = 1;
#ifdef _OPENMP
#pragma omp parallel
    {
#pragma omp single
      threads = omp_get_num_threads();
    }
#endif
    std::printf("draws %llu, chunk %llu, threads %d\n",
                static_cast<unsigned long long>(draws),
                static_cast<unsigned long long>(chunk), threads);

    sfcapm::SampleSums serial_sums;
    sfcapm::SampleSums parallel_sums;
    double serial_best = 1e300;
    double parallel_best = 1e300;
    for (int i = 0; i < repeats; ++i) {
      const double s =
          seconds_for(config, sfcapm::RunMode::serial, serial_sums);
      const double p =
          seconds_for(config, sfcapm::RunMode::parallel, parallel_sums);
      if (s < serial_best) serial_best = s;
      if (p < parallel_best) parallel_best = p;
    }
    const bool match = identical(serial_sums, parallel_sums);

    std::printf("serial   %.3f s  (%.1f Mdraws/s)\n", serial_best,
                draws / serial_best / 1e6);
    std::printf("parallel %.3f s  (%.1f Mdraws/s)\n", parallel_best,
                draws / parallel_best / 1e6);
    std::printf("speedup  %.2fx\n", serial_best / parallel_best);
    std::printf("totals bit-identical: %s\n", match ? "yes" : "NO");
    return match ? 0 : 1;
  } catch (const std::exception& error) {
    std::fprintf(stderr, "error: %s\n", error.what());
    return 2;
  }
}
