#pragma once

#include <vector>

namespace sfcapm {

enum class RiskClass {
  risk_averse,
  risk_loving,
  not_enough_risk_loving,
  risk_neutral,
  unclassified,
};

enum class Comparison { greater, equal, less };

enum class CurvePosition { below, above, coincident };

const char* to_string(RiskClass value);
const char* to_string(Comparison value);
const char* to_string(CurvePosition value);

// Behavioural classification of a one-period gamble. allocation is the
// signed utility increment (eta - 1) * expected_utility; comparison relates
// certain_utility to beta * eta * expected_utility under a relative
// tolerance of 1e-12, so the classification commutes with positive joint
// rescaling of both utilities.
struct RiskAssessment {
  double certain_utility = 0;
  double expected_utility = 0;
  double beta = 0;
  double eta = 0;
  double allocation = 0;
  double discounted_scaled = 0;  // beta * eta * expected_utility
  Comparison comparison = Comparison::equal;
  RiskClass classification = RiskClass::unclassified;
};

// Classification rule: equal comparison is risk_neutral; nonpositive
// allocation with greater is risk_averse; positive allocation is
// risk_loving (less) or not_enough_risk_loving (greater); the remaining
// cell (negative allocation, less) has no defined class and comes back
// unclassified. Requires beta in (0, 1] and eta > 0.
RiskAssessment classify(double certain_utility, double expected_utility,
                        double beta, double eta);

// Position of the scaled utility curve eta*u(w) relative to u(w) over all
// positive wealth under CRRA: below iff (eta-1)(1-rho) < 0, above iff
// positive, coincident iff eta = 1. rho = 1 throws domain_error because
// eta*ln(w) crosses ln(w) at w = 1 and no single label exists.
CurvePosition curve_position(double eta, double rho);

// Second-order approximation of the premium paid to avoid a zero-mean
// gamble: variance * rho / (2 * wealth). Requires wealth > 0.
double risk_premium_approx(double gamble_variance, double wealth, double rho);

// Utility curve samples u(w), eta*u(w), beta*eta*u(w) over a wealth grid.
struct CurveSample {
  double wealth = 0;
  double utility = 0;
  double scaled = 0;             // eta * u(w)
  double discounted_scaled = 0;  // beta * eta * u(w)
};
std::vector<CurveSample> curve_samples(double rho, double eta, double beta,
                                       const std::vector<double>& wealth_grid);

}  // namespace sfcapm
