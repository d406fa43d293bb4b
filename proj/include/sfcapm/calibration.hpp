#pragma once

#include <array>
#include <string>

#include "sfcapm/types.hpp"

namespace sfcapm {

// Right-hand sides of the three log-linear calibration equations, kept
// together with the moment inputs they were built from:
//   t1 = ln E[R_e] - ln E[x] + ln beta
//   t2 = ln R_f + ln beta
//   t3 = ln E[R_e] - ln R_f
struct CalibrationTargets {
  double t1;
  double t2;
  double t3;
  GrowthMoments moments;
  double beta;

  // Targets rebuilt from six-decimal log statistics, plus six-decimal
  // moments: the view that reproduces published coefficients exactly.
  CalibrationTargets rounded() const;
};

CalibrationTargets build_targets(const EconomySummary& summary, double beta);

// Residuals of the calibration system at (ln zeta, ln xi, rho):
//   r1 = -ln zeta - mu (1-rho) - var (1-rho)^2 / 2 - t1
//   r2 = -ln xi   + mu rho     - var rho^2 / 2     - t2
//   r3 =  ln xi - ln zeta + var rho                - t3
std::array<double, 3> residuals(double ln_zeta, double ln_xi, double rho,
                                const CalibrationTargets& targets);

// Analytic Jacobian, rows in residual order, columns (ln zeta, ln xi, rho).
// Row 3 equals row 1 minus row 2 identically, so the rank never exceeds 2.
std::array<std::array<double, 3>, 3> jacobian(double ln_zeta, double ln_xi,
                                              double rho,
                                              const CalibrationTargets& targets);

// Closed-form solution of the first two equations with rho pinned.
// premium_residual is the third-equation residual at that point; it is
// independent of rho whenever the targets are mutually consistent.
struct PinnedSolution {
  double ln_zeta;
  double ln_xi;
  double zeta;
  double xi;
  double premium_residual;
};
PinnedSolution solve_pinned(double rho, const CalibrationTargets& targets);

// One-parameter family solving the first two equations exactly for every
// rho: ln zeta and ln xi as quadratics in rho, coefficients in order
// (constant, linear, quadratic).
struct SolutionFamily {
  std::array<double, 3> ln_zeta_coeffs{};
  std::array<double, 3> ln_xi_coeffs{};
  std::string text;

  double ln_zeta_at(double rho) const;
  double ln_xi_at(double rho) const;
};
SolutionFamily solution_family(const CalibrationTargets& targets);

// Consistency and rank certificate. The witness t3 - t1 + t2 - (mu + var/2)
// vanishes exactly when the three equations are mutually consistent; its
// negative is the third residual everywhere on the two-equation solution
// family. Singular values of the Jacobian certify rank 2.
struct DegeneracyReport {
  double witness = 0;
  bool consistent = false;  // |witness| <= 1e-5
  int jacobian_rank = 0;    // singular values above 1e-8 of the largest
  std::array<double, 3> singular_values{};
  double sv_ratio = 0;      // smallest over largest
  std::string verdict;
};
DegeneracyReport rank_certificate(const CalibrationTargets& targets);

struct SolveOptions {
  int max_iterations = 200;
  double sse_step_tolerance = 1e-18;
  double initial_damping = 1e-3;
};

struct InitialGuess {
  double ln_zeta = 0.0;
  double ln_xi = 0.0;
  double rho = 2.0;
};

// Damped least-squares solution of the full 3x3 system. With consistent
// targets the SSE reaches machine zero but the solved point is only one
// member of a rank-2 family; the attached certificate, family and
// initial_guess_dependent flag make that explicit rather than presenting
// the point as unique. Throws numeric_error if max_iterations pass while
// steps still improve the SSE by more than the tolerance.
struct CalibrationResult {
  double zeta = 0;
  double xi = 0;
  double rho = 0;
  std::array<double, 3> residual{};
  double sse = 0;
  int iterations = 0;
  bool converged = false;
  DegeneracyReport certificate;
  SolutionFamily family;
  bool initial_guess_dependent = false;
};
CalibrationResult solve_full(const InitialGuess& start,
                             const CalibrationTargets& targets,
                             const SolveOptions& options = {});

}  // namespace sfcapm
