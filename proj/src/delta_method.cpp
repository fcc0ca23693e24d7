#include "qardl/delta_method.hpp"

#include <cmath>

#include "qardl/errors.hpp"

namespace qardl {

DeltaResult delta_method(const Eigen::VectorXd& coefficients,
                         const Eigen::MatrixXd& covariance,
                         const std::vector<DeltaComponent>& transform) {
  const Eigen::Index k = coefficients.size();
  const auto m = static_cast<Eigen::Index>(transform.size());
  auto check = [&](int idx) {
    if (idx < 0 || idx >= k) {
      throw ConfigError("delta method: coefficient index out of range");
    }
  };

  Eigen::VectorXd values(m);
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(m, k);
  for (Eigen::Index r = 0; r < m; ++r) {
    const auto& c = transform[static_cast<std::size_t>(r)];
    switch (c.kind) {
      case DeltaComponent::Kind::identity: {
        if (c.indices.size() != 1) throw ConfigError("delta method: identity takes one index");
        check(c.indices[0]);
        values(r) = coefficients(c.indices[0]);
        jac(r, c.indices[0]) = 1.0;
        break;
      }
      case DeltaComponent::Kind::sum: {
        if (c.indices.empty()) throw ConfigError("delta method: sum takes >= 1 index");
        double total = 0.0;
        for (int idx : c.indices) {
          check(idx);
          total += coefficients(idx);
          jac(r, idx) += 1.0;
        }
        values(r) = total;
        break;
      }
      case DeltaComponent::Kind::neg_ratio: {
        if (c.indices.size() != 2) throw ConfigError("delta method: neg_ratio takes two indices");
        check(c.indices[0]);
        check(c.indices[1]);
        const double num = coefficients(c.indices[0]);
        const double den = coefficients(c.indices[1]);
        if (std::fabs(den) < 1e-10) {
          throw EstimationError("delta method: ratio denominator within 1e-10 of zero");
        }
        values(r) = -num / den;
        jac(r, c.indices[0]) = -1.0 / den;
        jac(r, c.indices[1]) = num / (den * den);
        break;
      }
    }
  }

  DeltaResult out;
  out.values = values;
  out.covariance = jac * covariance * jac.transpose();
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose().eval());
  out.std_errors.resize(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    out.std_errors(r) = std::sqrt(std::max(out.covariance(r, r), 0.0));
  }
  return out;
}

}  // namespace qardl
