#include "sfcapm/risk.hpp"

#include <cmath>

#include "sfcapm/errors.hpp"
#include "sfcapm/pricing.hpp"

namespace sfcapm {

const char* to_string(RiskClass value) {
  switch (value) {
    case RiskClass::risk_averse: return "risk_averse";
    case RiskClass::risk_loving: return "risk_loving";
    case RiskClass::not_enough_risk_loving: return "not_enough_risk_loving";
    case RiskClass::risk_neutral: return "risk_neutral";
    case RiskClass::unclassified: return "unclassified";
  }
  return "unclassified";
}

const char* to_string(Comparison value) {
  switch (value) {
    case Comparison::greater: return "greater";
    case Comparison::equal: return "equal";
    case Comparison::less: return "less";
  }
  return "equal";
}

const char* to_string(CurvePosition value) {
  switch (value) {
    case CurvePosition::below: return "below";
    case CurvePosition::above: return "above";
    case CurvePosition::coincident: return "coincident";
  }
  return "coincident";
}

RiskAssessment classify(double certain_utility, double expected_utility,
                        double beta, double eta) {
  if (!(beta > 0.0 && beta <= 1.0))
    throw domain_error("classify: beta must lie in (0, 1]");
  if (!(eta > 0.0)) throw domain_error("classify: eta must be positive");
  if (!std::isfinite(certain_utility) || !std::isfinite(expected_utility))
    throw domain_error("classify: utilities must be finite");

  RiskAssessment out;
  out.certain_utility = certain_utility;
  out.expected_utility = expected_utility;
  out.beta = beta;
  out.eta = eta;
  out.allocation = (eta - 1.0) * expected_utility;
  out.discounted_scaled = beta * eta * expected_utility;

  // Relative equality tolerance keeps every branch invariant under positive
  // joint rescaling of the two utilities.
  const double scale =
      std::max(std::abs(certain_utility), std::abs(out.discounted_scaled));
  if (std::abs(certain_utility - out.discounted_scaled) <= 1e-12 * scale) {
    out.comparison = Comparison::equal;
  } else if (certain_utility > out.discounted_scaled) {
    out.comparison = Comparison::greater;
  } else {
    out.comparison = Comparison::less;
  }

  if (out.comparison == Comparison::equal) {
    out.classification = RiskClass::risk_neutral;
  } else if (out.allocation <= 0.0 && out.comparison == Comparison::greater) {
    out.classification = RiskClass::risk_averse;
  } else if (out.allocation > 0.0 && out.comparison == Comparison::less) {
    out.classification = RiskClass::risk_loving;
  } else if (out.allocation > 0.0 && out.comparison == Comparison::greater) {
    out.classification = RiskClass::not_enough_risk_loving;
  } else {
    // Negative or zero allocation with a less comparison has no defined
    // class; report it distinctly instead of forcing one.
    out.classification = RiskClass::unclassified;
  }
  return out;
}

CurvePosition curve_position(double eta, double rho) {
  if (!(eta > 0.0)) throw domain_error("curve_position: eta must be positive");
  if (!(rho >= 0.0))
    throw domain_error("curve_position: rho must be nonnegative");
  if (rho == 1.0)
    throw domain_error(
        "curve_position: log utility changes sign at w = 1, scaled and "
        "unscaled curves cross there");
  if (eta == 1.0) return CurvePosition::coincident;
  return (eta - 1.0) * (1.0 - rho) < 0.0 ? CurvePosition::below
                                         : CurvePosition::above;
}

double risk_premium_approx(double gamble_variance, double wealth, double rho) {
  if (!(wealth > 0.0))
    throw domain_error("risk_premium_approx: wealth must be positive");
  if (!(gamble_variance >= 0.0))
    throw domain_error("risk_premium_approx: variance must be nonnegative");
  if (!(rho >= 0.0))
    throw domain_error("risk_premium_approx: rho must be nonnegative");
  return 0.5 * gamble_variance * (rho / wealth);
}

std::vector<CurveSample> curve_samples(double rho, double eta, double beta,
                                       const std::vector<double>& wealth_grid) {
  if (!(eta > 0.0)) throw domain_error("curve_samples: eta must be positive");
  if (!(beta > 0.0 && beta <= 1.0))
    throw domain_error("curve_samples: beta must lie in (0, 1]");
  std::vector<CurveSample> rows;
  rows.reserve(wealth_grid.size());
  for (double wealth : wealth_grid) {
    const double utility = crra_utility(wealth, rho).utility;
    rows.push_back({wealth, utility, eta * utility, beta * eta * utility});
  }
  return rows;
}

}  // namespace sfcapm
