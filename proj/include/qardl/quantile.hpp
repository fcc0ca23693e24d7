#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "qardl/exec.hpp"

namespace qardl {

enum class QrMethod {
  automatic,      // simplex up to 5000 rows, interior point above
  simplex,        // exterior-point vertex simplex
  interior_point  // primal-dual interior point, polished to a vertex
};

struct QrFit {
  double quantile = 0.5;
  Eigen::VectorXd coefficients;
  Eigen::MatrixXd covariance;  // Powell kernel sandwich, Hall-Sheather bandwidth
  Eigen::VectorXd residuals;
  Eigen::VectorXd fitted;
  double objective = 0.0;      // sum of check losses
  int iterations = 0;
  std::string method;          // "simplex" or "interior-point"
  // Largest normalized descent-direction violation at the returned vertex;
  // optimality requires it to be >= -tolerance.
  double optimality_gap = 0.0;
  double tolerance = 1e-9;
};

// Sum of check losses rho_gamma(e) = e * (gamma - 1{e<0}).
double check_loss(const Eigen::VectorXd& residuals, double gamma);

// Minimizes the check loss. Solutions are exact basic (vertex) solutions:
// the solver finishes at a basis of k interpolated rows, and among optimal
// vertices it slides along flat edges to the lexicographically smallest
// coefficient vector (so an intercept-only fit returns the lower empirical
// quantile). Throws EstimationError on rank deficiency, n <= k, or
// non-convergence; ConfigError on gamma outside (0,1).
QrFit quantile_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                   double gamma, const std::vector<std::string>& names = {},
                   QrMethod method = QrMethod::automatic);

// Pairs (row) bootstrap covariance of the quantile-fit coefficients.
// Replication b draws from a generator seeded with derive_seed(seed, b),
// so results are identical under either execution policy.
Eigen::MatrixXd quantile_bootstrap_covariance(const Eigen::MatrixXd& X,
                                              const Eigen::VectorXd& y,
                                              double gamma, int replications,
                                              std::uint64_t seed,
                                              Execution exec = Execution::serial);

}  // namespace qardl
