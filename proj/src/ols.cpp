#include "qardl/ols.hpp"

#include "qardl/errors.hpp"

namespace qardl {

OlsFit ols_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
               const std::vector<std::string>& names) {
  const Eigen::Index n = X.rows();
  const Eigen::Index k = X.cols();
  if (y.size() != n) throw EstimationError("ols: X and y row counts differ");
  if (n <= k) {
    throw EstimationError("ols: need more observations than columns (n=" +
                          std::to_string(n) + ", k=" + std::to_string(k) + ")");
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < k) {
    // Pivot order puts the dependent columns last.
    std::string culprits;
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index j = qr.rank(); j < k; ++j) {
      if (!culprits.empty()) culprits += ", ";
      const auto col = static_cast<std::size_t>(perm(j));
      culprits += col < names.size() ? names[col] : "column " + std::to_string(perm(j));
    }
    throw EstimationError("ols: design is rank deficient; dependent columns: " + culprits);
  }

  OlsFit fit;
  fit.coefficients = qr.solve(y);
  fit.fitted = X * fit.coefficients;
  fit.residuals = y - fit.fitted;
  fit.dof = static_cast<long>(n - k);
  fit.sigma2 = fit.residuals.squaredNorm() / static_cast<double>(fit.dof);

  // (X'X)^-1 from the R factor: X P = Q R  =>  (X'X)^-1 = P R^-1 R^-T P'.
  Eigen::MatrixXd r = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
  Eigen::MatrixXd rinv = r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
  Eigen::MatrixXd xtx_inv = rinv * rinv.transpose();
  const auto& perm = qr.colsPermutation();
  fit.covariance = fit.sigma2 * (perm * xtx_inv * perm.transpose());
  fit.covariance = 0.5 * (fit.covariance + fit.covariance.transpose().eval());
  return fit;
}

}  // namespace qardl
