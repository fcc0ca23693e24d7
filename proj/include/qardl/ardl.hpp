#pragma once

#include <string>
#include <vector>

#include "qardl/exec.hpp"
#include "qardl/lag_design.hpp"
#include "qardl/ols.hpp"

namespace qardl {

enum class Criterion { aic, bic };

// One reported coefficient with normal-approximation inference.
// `defined` is false for long-run entries whose denominator rho is
// numerically zero (value carries NaN then, never a fabricated number).
struct Coefficient {
  std::string label;
  double value = 0.0;
  double std_error = 0.0;
  double t_ratio = 0.0;
  double p_value = 1.0;
  std::string stars;
  bool defined = true;
};

// Short-run symbol stem per role, following the usual ARDL notation:
// phi (dependent), omega, lambda, theta, psi, delta.
std::string short_run_symbol(VariableRole role);

// Everything the error-correction parameterization reports, extracted from
// a differenced-form fit (OLS or quantile):
//   rho_star    coefficient on the lag-1 dependent level (speed of adjustment)
//   level_terms coefficients on the lag-1 regressor levels
//   long_run    beta_X = -phi_X / rho with delta-method errors
//   cumulative  sums of each variable's difference terms (phi*, omega*, ...)
//   short_run   the individual difference terms
//   projection  loadings on the contemporaneous differences
struct EcmCoefficients {
  double alpha = 0.0;
  double alpha_se = 0.0;
  Coefficient rho_star;
  std::vector<Coefficient> level_terms;
  std::vector<Coefficient> long_run;
  std::vector<Coefficient> cumulative;
  std::vector<Coefficient> short_run;
  std::vector<Coefficient> projection;
  // Set when rho_star is non-negative or insignificant at the 10% level:
  // the specification then shows no error-correction behavior.
  bool no_error_correction = false;
  std::string warning;
};

struct ArdlFit {
  ModelSpec spec;
  AlignedPanel panel;
  LagDesign design;  // levels form
  OlsFit ols;
  double aic = 0.0;
  double bic = 0.0;
};

struct EcmFit {
  ModelSpec spec;
  EcmCoefficients coefficients;
  Eigen::VectorXd residuals;
  std::vector<Date> dates;
  double aic = 0.0;
  double bic = 0.0;
};

// Builds the labeled tables from a differenced-form coefficient vector and
// covariance. When throw_on_zero_rho is false, a |rho| < 1e-10 marks the
// long-run entries undefined instead of raising.
EcmCoefficients extract_ecm_coefficients(const LagDesign& design,
                                         const Eigen::VectorXd& coefficients,
                                         const Eigen::MatrixXd& covariance,
                                         bool throw_on_zero_rho);

// OLS on the levels design.
ArdlFit fit_linear_ardl(const AlignedPanel& panel, const ModelSpec& spec);

// Refits the algebraically equivalent differenced form and extracts the
// error-correction tables. Throws EstimationError when rho is within 1e-10
// of zero (no error-correction representation).
EcmFit to_ecm(const ArdlFit& fit);

// Exhaustive information-criterion search over p in 1..max_p and each
// regressor's q in 0..max_q, every candidate fit on the common truncated
// sample so criteria are comparable. Ties prefer the smaller total lag
// count, then the lexicographically smaller (p, q...) tuple.
ModelSpec select_lags(const AlignedPanel& panel, int max_p, int max_q,
                      Criterion criterion, Execution exec = Execution::serial);

}  // namespace qardl
