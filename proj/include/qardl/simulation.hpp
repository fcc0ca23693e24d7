#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "qardl/exec.hpp"
#include "qardl/model_spec.hpp"
#include "qardl/panel.hpp"

namespace qardl {

enum class ErrorKind { gaussian, student_t, location_scale };
enum class RegressorProcess { random_walk, ar1 };

// A known error-correction data-generating process:
//   dY_t = alpha + rho*(Y_{t-1} - beta'X_{t-1}) + sum_i phi_i dY_{t-i}
//          + sum_x sum_i w_{x,i} dX_{x,t-i} + eps_t
// Regressors are independent random walks (or AR(1)); eps is gaussian,
// Student-t, or gaussian with scale sigma*(1 + scale_slope*dX_scale) — the
// location-scale design whose conditional quantile slopes vary in gamma.
struct DgpSpec {
  double rho = -0.2;
  std::vector<double> beta = {0.3, 1.0, 0.5, 0.1, -0.4};  // long-run, per regressor
  double alpha = 0.0;
  std::vector<double> dep_short_run;                // phi_1..phi_{p-1}
  std::vector<std::vector<double>> reg_short_run;   // per regressor, lag 0 first

  ErrorKind error = ErrorKind::gaussian;
  double sigma = 1.0;
  int t_df = 5;
  int scale_regressor = 0;    // location_scale: which regressor drives the scale
  double scale_slope = 0.3;   // must keep 1 + slope*dX positive (dX truncated at |2|)

  RegressorProcess regressor_process = RegressorProcess::random_walk;
  double ar1_coefficient = 0.5;
  double regressor_sigma = 1.0;

  int n = 2000;
  std::uint64_t seed = 1;

  // The estimating lag structure the DGP corresponds to.
  ModelSpec truth_spec() const;
  std::size_t regressor_count() const { return beta.size(); }
  // Throws ConfigError on an unstable or inconsistent specification.
  void validate() const;
};

// Simulates the DGP with a 200-observation burn-in. Column names are
// "Y", "X1", "X2", ...; the same seed always yields the identical panel.
AlignedPanel simulate_panel(const DgpSpec& dgp);

enum class Estimator { ardl, qardl };

struct RecoveryParameter {
  std::string label;
  double truth = 0.0;  // NaN when the DGP implies no single true value
  double mean = 0.0;
  double median = 0.0;
  double sd = 0.0;
  double bias = 0.0;      // mean - truth
  double rmse = 0.0;
  double coverage = 0.0;  // fraction of nominal-95% intervals covering truth
  double mean_std_error = 0.0;
  std::size_t n_used = 0;
};

struct RecoveryStudy {
  std::vector<RecoveryParameter> parameters;
  Eigen::MatrixXd estimates;   // replications x parameters, NaN where missing
  Eigen::MatrixXd std_errors;
  std::vector<std::uint8_t> rep_ok;
  int replications = 0;
  int failures = 0;
  std::vector<std::string> failure_messages;  // up to the first five
  // Coverage rates are noisy below ~50 replications; flagged rather than
  // refused so that quick smoke runs stay possible.
  bool unreliable_coverage = false;
};

// Monte-Carlo recovery experiment: per-replication seeds derive from the
// master seed, aggregation is scheduling-independent, and a failure rate
// above 20% aborts with the collected diagnostics. Tracked parameters are
// alpha, rho*, the long-run betas, and every short-run term (suffixed
// "@gamma" for the qardl estimator).
RecoveryStudy run_recovery_study(const DgpSpec& dgp, int replications,
                                 Estimator estimator,
                                 const std::vector<double>& quantiles = {0.5},
                                 Execution exec = Execution::parallel);

}  // namespace qardl
