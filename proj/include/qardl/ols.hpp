#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace qardl {

struct OlsFit {
  Eigen::VectorXd coefficients;
  Eigen::MatrixXd covariance;  // s^2 (X'X)^-1
  Eigen::VectorXd residuals;
  Eigen::VectorXd fitted;
  long dof = 0;                // n - k
  double sigma2 = 0.0;         // e'e / (n - k)

  double rss() const { return residuals.squaredNorm(); }
};

// Least squares via column-pivoted Householder QR. `names`, when given,
// labels columns in rank-deficiency errors (the columns the pivoting marks
// as dependent are reported). Throws EstimationError on n <= k or rank
// deficiency.
OlsFit ols_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
               const std::vector<std::string>& names = {});

}  // namespace qardl
