#include "sfcapm/calibration.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <cstdio>
#include <sstream>

#include "sfcapm/errors.hpp"
#include "sfcapm/moments.hpp"

namespace sfcapm {
namespace {

// Rank threshold on singular values relative to the largest, and the
// consistency tolerance on the witness.
constexpr double kRankThreshold = 1e-8;
constexpr double kWitnessTolerance = 1e-5;

double round6(double value) { return std::round(value * 1e6) / 1e6; }

Eigen::Matrix3d jacobian_matrix(double rho, const CalibrationTargets& t) {
  const double mu = t.moments.mu_x;
  const double var = t.moments.var_x;
  Eigen::Matrix3d j;
  j << -1.0, 0.0, mu + var * (1.0 - rho),
       0.0, -1.0, mu - var * rho,
       -1.0, 1.0, var;
  return j;
}

Eigen::Vector3d residual_vector(const Eigen::Vector3d& point,
                                const CalibrationTargets& targets) {
  const auto r = residuals(point[0], point[1], point[2], targets);
  return {r[0], r[1], r[2]};
}

}  // namespace

CalibrationTargets CalibrationTargets::rounded() const {
  // The published coefficients come from six-decimal log statistics, not
  // from rounding the combined targets: recover ln E[R_e], ln R_f, ln E[x]
  // and ln beta from the stored targets, round each to six decimals, then
  // recombine. The outer round6 lands exactly on the published decimals and
  // keeps the rounded system mutually consistent (witness at rounding
  // noise), which direct rounding of t1..t3 does not guarantee.
  const double ln_beta = std::log(beta);
  const double log_equity = round6(t2 + t3 - ln_beta);
  const double log_risk_free = round6(t2 - ln_beta);
  const double log_growth = round6(t2 + t3 - t1);
  const double log_discount = round6(ln_beta);
  return CalibrationTargets{
      round6(log_equity - log_growth + log_discount),
      round6(log_risk_free + log_discount),
      round6(log_equity - log_risk_free),
      GrowthMoments(round6(moments.mu_x), round6(moments.var_x),
                    round6(moments.mu_z), round6(moments.var_z),
                    round6(moments.cov_xz)),
      beta};
}

CalibrationTargets build_targets(const EconomySummary& summary, double beta) {
  if (!(beta > 0.0 && beta <= 1.0))
    throw domain_error("build_targets: beta must lie in (0, 1]");
  const LognormalParams p =
      moments_from_summary(summary.mean_growth, summary.sd_growth);
  const double log_beta = std::log(beta);
  return CalibrationTargets{
      std::log(summary.mean_equity_return) - std::log(summary.mean_growth) +
          log_beta,
      std::log(summary.risk_free_rate) + log_beta,
      std::log(summary.mean_equity_return) - std::log(summary.risk_free_rate),
      GrowthMoments::consumption_only(p.mu, p.var),
      beta};
}

std::array<double, 3> residuals(double ln_zeta, double ln_xi, double rho,
                                const CalibrationTargets& targets) {
  const double mu = targets.moments.mu_x;
  const double var = targets.moments.var_x;
  const double omr = 1.0 - rho;
  return {-ln_zeta - mu * omr - 0.5 * var * omr * omr - targets.t1,
          -ln_xi + mu * rho - 0.5 * var * rho * rho - targets.t2,
          ln_xi - ln_zeta + var * rho - targets.t3};
}

std::array<std::array<double, 3>, 3> jacobian(
    double /*ln_zeta*/, double /*ln_xi*/, double rho,
    const CalibrationTargets& targets) {
  const Eigen::Matrix3d j = jacobian_matrix(rho, targets);
  std::array<std::array<double, 3>, 3> out;
  for (int row = 0; row < 3; ++row)
    for (int col = 0; col < 3; ++col) out[row][col] = j(row, col);
  return out;
}

PinnedSolution solve_pinned(double rho, const CalibrationTargets& targets) {
  const double mu = targets.moments.mu_x;
  const double var = targets.moments.var_x;
  const double omr = 1.0 - rho;
  const double ln_zeta = -targets.t1 - mu * omr - 0.5 * var * omr * omr;
  const double ln_xi = -targets.t2 + mu * rho - 0.5 * var * rho * rho;
  const double premium_residual = ln_xi - ln_zeta + var * rho - targets.t3;
  return {ln_zeta, ln_xi, std::exp(ln_zeta), std::exp(ln_xi),
          premium_residual};
}

double SolutionFamily::ln_zeta_at(double rho) const {
  return ln_zeta_coeffs[0] +
         rho * (ln_zeta_coeffs[1] + rho * ln_zeta_coeffs[2]);
}

double SolutionFamily::ln_xi_at(double rho) const {
  return ln_xi_coeffs[0] + rho * (ln_xi_coeffs[1] + rho * ln_xi_coeffs[2]);
}

SolutionFamily solution_family(const CalibrationTargets& targets) {
  const double mu = targets.moments.mu_x;
  const double var = targets.moments.var_x;
  SolutionFamily family;
  family.ln_zeta_coeffs = {-targets.t1 - mu - 0.5 * var, mu + var, -0.5 * var};
  family.ln_xi_coeffs = {-targets.t2, mu, -0.5 * var};
  char buffer[192];
  std::snprintf(buffer, sizeof buffer,
                "ln_zeta(rho) = %.9g + %.9g rho + %.9g rho^2; "
                "ln_xi(rho) = %.9g + %.9g rho + %.9g rho^2",
                family.ln_zeta_coeffs[0], family.ln_zeta_coeffs[1],
                family.ln_zeta_coeffs[2], family.ln_xi_coeffs[0],
                family.ln_xi_coeffs[1], family.ln_xi_coeffs[2]);
  family.text = buffer;
  return family;
}

DegeneracyReport rank_certificate(const CalibrationTargets& targets) {
  DegeneracyReport report;
  report.witness = targets.t3 - targets.t1 + targets.t2 -
                   (targets.moments.mu_x + 0.5 * targets.moments.var_x);
  report.consistent = std::abs(report.witness) <= kWitnessTolerance;
  // The Jacobian rank does not depend on the evaluation point; rho = 1 is
  // as good as any.
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(jacobian_matrix(1.0, targets));
  const Eigen::Vector3d sv = svd.singularValues();
  report.singular_values = {sv[0], sv[1], sv[2]};
  report.sv_ratio = sv[2] / sv[0];
  report.jacobian_rank = 0;
  for (int i = 0; i < 3; ++i)
    if (sv[i] > kRankThreshold * sv[0]) ++report.jacobian_rank;
  if (!report.consistent) {
    report.verdict =
        "targets are inconsistent as equalities; any solve yields a "
        "least-squares compromise";
  } else if (report.jacobian_rank == 2) {
    report.verdict =
        "rank-deficient: a one-parameter solution family, no unique point";
  } else if (report.jacobian_rank == 3) {
    report.verdict = "full rank: an isolated solution point";
  } else {
    report.verdict = "rank below 2: the system is degenerate in both factors";
  }
  return report;
}

CalibrationResult solve_full(const InitialGuess& start,
                             const CalibrationTargets& targets,
                             const SolveOptions& options) {
  if (options.max_iterations < 1)
    throw domain_error("solve_full: max_iterations must be at least 1");
  if (!(options.sse_step_tolerance >= 0.0))
    throw domain_error("solve_full: tolerance must be nonnegative");
  if (!(options.initial_damping > 0.0))
    throw domain_error("solve_full: initial damping must be positive");

  Eigen::Vector3d point(start.ln_zeta, start.ln_xi, start.rho);
  Eigen::Vector3d residual = residual_vector(point, targets);
  double sse = residual.squaredNorm();
  double damping = options.initial_damping;
  int iterations = 0;
  bool converged = false;

  while (iterations < options.max_iterations && !converged) {
    ++iterations;
    const Eigen::Matrix3d j = jacobian_matrix(point[2], targets);
    const Eigen::Matrix3d hessian = j.transpose() * j;
    const Eigen::Vector3d gradient = j.transpose() * residual;
    double improvement = 0.0;
    bool stepped = false;
    while (damping <= 1e14) {
      const Eigen::Matrix3d damped =
          hessian + damping * Eigen::Matrix3d::Identity();
      const Eigen::Vector3d candidate =
          point + damped.ldlt().solve(-gradient);
      const Eigen::Vector3d candidate_residual =
          residual_vector(candidate, targets);
      const double candidate_sse = candidate_residual.squaredNorm();
      if (candidate_sse <= sse) {
        improvement = sse - candidate_sse;
        point = candidate;
        residual = candidate_residual;
        sse = candidate_sse;
        damping = std::max(damping * 0.2, 1e-12);
        stepped = true;
        break;
      }
      damping *= 10.0;
    }
    // A round in which no damped step improves the SSE is a numerical
    // minimum; treat it like a converged zero-improvement step.
    if (!stepped || improvement <= options.sse_step_tolerance) converged = true;
  }

  if (!converged) {
    std::ostringstream msg;
    msg << "solve_full: no convergence after " << options.max_iterations
        << " iterations, sse = " << sse;
    throw numeric_error(msg.str());
  }

  CalibrationResult result;
  result.zeta = std::exp(point[0]);
  result.xi = std::exp(point[1]);
  result.rho = point[2];
  result.residual = residuals(point[0], point[1], point[2], targets);
  result.sse = sse;
  result.iterations = iterations;
  result.converged = true;
  result.certificate = rank_certificate(targets);
  result.family = solution_family(targets);
  result.initial_guess_dependent = result.certificate.jacobian_rank < 3;
  return result;
}

}  // namespace sfcapm
