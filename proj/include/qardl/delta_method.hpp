#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace qardl {

// One output coordinate of a transform g(theta). The three kinds cover
// everything the long-run/short-run tables need: pass-through of a
// coefficient, a sum of coefficients, and the ratio -num/den.
struct DeltaComponent {
  enum class Kind { identity, sum, neg_ratio };
  Kind kind = Kind::identity;
  std::vector<int> indices;  // identity: {i}; sum: {i...}; neg_ratio: {num, den}
  std::string label;
};

struct DeltaResult {
  Eigen::VectorXd values;
  Eigen::VectorXd std_errors;
  Eigen::MatrixXd covariance;  // J Cov J' for the full transform
};

// First-order (delta method) propagation with analytic gradients. Throws
// EstimationError when a neg_ratio denominator is within 1e-10 of zero and
// ConfigError on out-of-range indices.
DeltaResult delta_method(const Eigen::VectorXd& coefficients,
                         const Eigen::MatrixXd& covariance,
                         const std::vector<DeltaComponent>& transform);

}  // namespace qardl
