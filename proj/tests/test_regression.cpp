#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "qardl/delta_method.hpp"
#include "qardl/errors.hpp"
#include "qardl/ols.hpp"
#include "qardl/quantile.hpp"
#include "qardl/stats.hpp"

using namespace qardl;

namespace {

Eigen::MatrixXd gauss_design(std::uint64_t seed, int n, int k,
                             bool intercept = true) {
  Rng r(seed);
  Eigen::MatrixXd X(n, k);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < k; ++j) {
      X(i, j) = (intercept && j == 0) ? 1.0 : r.normal();
    }
  }
  return X;
}

Eigen::VectorXd gauss_vector(std::uint64_t seed, int n) {
  Rng r(seed);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = r.normal();
  return v;
}

// Independent least-squares oracle: normal equations accumulated and solved
// in extended precision with Gauss-Jordan elimination.
struct NormalEquationsFit {
  std::vector<long double> coefficients;
  std::vector<long double> covariance;  // row-major k x k
};

NormalEquationsFit normal_equations_oracle(const Eigen::MatrixXd& X,
                                           const Eigen::VectorXd& y) {
  const int n = static_cast<int>(X.rows());
  const int k = static_cast<int>(X.cols());
  std::vector<long double> A(static_cast<std::size_t>(k) * k, 0.0L);
  std::vector<long double> b(k, 0.0L);
  for (int i = 0; i < n; ++i) {
    for (int p = 0; p < k; ++p) {
      b[p] += static_cast<long double>(X(i, p)) * y(i);
      for (int q = 0; q < k; ++q) {
        A[p * k + q] += static_cast<long double>(X(i, p)) * X(i, q);
      }
    }
  }
  // Gauss-Jordan inversion with partial pivoting.
  std::vector<long double> inv(static_cast<std::size_t>(k) * k, 0.0L);
  for (int i = 0; i < k; ++i) inv[i * k + i] = 1.0L;
  std::vector<long double> work = A;
  for (int col = 0; col < k; ++col) {
    int pivot = col;
    for (int row = col + 1; row < k; ++row) {
      if (std::fabs(static_cast<double>(work[row * k + col])) >
          std::fabs(static_cast<double>(work[pivot * k + col]))) {
        pivot = row;
      }
    }
    for (int j = 0; j < k; ++j) {
      std::swap(work[pivot * k + j], work[col * k + j]);
      std::swap(inv[pivot * k + j], inv[col * k + j]);
    }
    const long double d = work[col * k + col];
    for (int j = 0; j < k; ++j) {
      work[col * k + j] /= d;
      inv[col * k + j] /= d;
    }
    for (int row = 0; row < k; ++row) {
      if (row == col) continue;
      const long double f = work[row * k + col];
      for (int j = 0; j < k; ++j) {
        work[row * k + j] -= f * work[col * k + j];
        inv[row * k + j] -= f * inv[col * k + j];
      }
    }
  }
  NormalEquationsFit fit;
  fit.coefficients.assign(k, 0.0L);
  for (int p = 0; p < k; ++p) {
    for (int q = 0; q < k; ++q) fit.coefficients[p] += inv[p * k + q] * b[q];
  }
  long double rss = 0.0L;
  for (int i = 0; i < n; ++i) {
    long double e = y(i);
    for (int p = 0; p < k; ++p) e -= static_cast<long double>(X(i, p)) * fit.coefficients[p];
    rss += e * e;
  }
  const long double sigma2 = rss / (n - k);
  fit.covariance.assign(static_cast<std::size_t>(k) * k, 0.0L);
  for (int p = 0; p < k * k; ++p) fit.covariance[p] = sigma2 * inv[p];
  return fit;
}

// Exhaustive check-loss minimum over every k-row interpolating vertex.
double vertex_enumeration_minimum(const Eigen::MatrixXd& X,
                                  const Eigen::VectorXd& y, double gamma) {
  const int n = static_cast<int>(X.rows());
  const int k = static_cast<int>(X.cols());
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> pick(k);
  // Iterate over all k-subsets of rows.
  for (int i = 0; i < k; ++i) pick[i] = i;
  while (true) {
    Eigen::MatrixXd B(k, k);
    Eigen::VectorXd rhs(k);
    for (int i = 0; i < k; ++i) {
      B.row(i) = X.row(pick[i]);
      rhs(i) = y(pick[i]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
    if (lu.isInvertible()) {
      const Eigen::VectorXd beta = lu.solve(rhs);
      const Eigen::VectorXd e = y - X * beta;
      CHECK(e.size() == n);
      best = std::min(best, check_loss(e, gamma));
    }
    // Next combination.
    int pos = k - 1;
    while (pos >= 0 && pick[pos] == n - k + pos) --pos;
    if (pos < 0) break;
    ++pick[pos];
    for (int i = pos + 1; i < k; ++i) pick[i] = pick[i - 1] + 1;
  }
  return best;
}

}  // namespace

// ---------------------------------------------------------------------------
// Least squares
// ---------------------------------------------------------------------------

TEST_CASE("least squares interpolates noiseless data") {
  auto X = gauss_design(1, 40, 3);
  Eigen::VectorXd beta(3);
  beta << 1.5, -2.0, 0.25;
  Eigen::VectorXd y = X * beta;
  auto fit = ols_fit(X, y);
  CHECK((fit.coefficients - beta).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(fit.residuals.cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("an intercept-only regression returns the sample mean") {
  Eigen::MatrixXd X = Eigen::MatrixXd::Ones(25, 1);
  auto y = gauss_vector(2, 25);
  auto fit = ols_fit(X, y);
  CHECK(fit.coefficients(0) == doctest::Approx(y.mean()).epsilon(1e-14));
}

TEST_CASE("QR least squares agrees with an extended-precision normal-equations oracle") {
  for (std::uint64_t seed : {10u, 11u, 12u}) {
    auto X = gauss_design(seed, 50, 4);
    Eigen::VectorXd beta(4);
    beta << 0.5, 1.0, -0.75, 0.1;
    Eigen::VectorXd y = X * beta + 0.4 * gauss_vector(seed + 100, 50);
    auto fit = ols_fit(X, y);
    auto oracle = normal_equations_oracle(X, y);
    for (int j = 0; j < 4; ++j) {
      CHECK(std::fabs(fit.coefficients(j) -
                      static_cast<double>(oracle.coefficients[j])) < 1e-8);
      for (int m = 0; m < 4; ++m) {
        CHECK(std::fabs(fit.covariance(j, m) -
                        static_cast<double>(oracle.covariance[j * 4 + m])) < 1e-8);
      }
    }
    CHECK(fit.dof == 46);
    CHECK(fit.sigma2 == doctest::Approx(fit.rss() / 46.0).epsilon(1e-12));
    // Residuals are orthogonal to the design.
    CHECK((X.transpose() * fit.residuals).cwiseAbs().maxCoeff() < 1e-8);
    // Fitted plus residual reproduces the response.
    CHECK((fit.fitted + fit.residuals - y).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("rank-deficient designs fail naming a dependent column") {
  Eigen::MatrixXd X = gauss_design(3, 30, 2, false);
  Eigen::MatrixXd Xbad(30, 3);
  Xbad << X, X.col(0) + X.col(1);
  auto y = gauss_vector(4, 30);
  try {
    ols_fit(Xbad, y, {"a", "b", "a_plus_b"});
    FAIL("expected EstimationError");
  } catch (const EstimationError& e) {
    const std::string msg = e.what();
    const bool named = msg.find('a') != std::string::npos ||
                       msg.find('b') != std::string::npos;
    CHECK(named);
  }
  CHECK_THROWS_AS(ols_fit(Eigen::MatrixXd::Ones(3, 4), gauss_vector(5, 3)),
                  EstimationError);
}

TEST_CASE("fitted values are invariant under design reparameterization") {
  auto X = gauss_design(6, 60, 3);
  Eigen::VectorXd y = X * Eigen::Vector3d(1.0, 2.0, -1.0) + gauss_vector(7, 60);
  Eigen::Matrix3d A;
  A << 1, 2, 0,
       0, 1, 1,
       1, 0, 3;  // invertible
  auto base = ols_fit(X, y);
  auto re = ols_fit(X * A, y);
  CHECK((base.fitted - re.fitted).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(std::fabs(base.rss() - re.rss()) < 1e-8);
}

// ---------------------------------------------------------------------------
// Quantile regression
// ---------------------------------------------------------------------------

TEST_CASE("check loss evaluates the asymmetric absolute criterion") {
  Eigen::VectorXd e(2);
  e << 1.0, -1.0;
  CHECK(check_loss(e, 0.3) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(check_loss(e, 0.5) == doctest::Approx(1.0).epsilon(1e-15));
  Eigen::VectorXd z(1);
  z << 0.0;
  CHECK(check_loss(z, 0.7) == 0.0);
}

TEST_CASE("intercept-only quantile fits return lower empirical quantiles exactly") {
  Eigen::MatrixXd X = Eigen::MatrixXd::Ones(10, 1);
  Eigen::VectorXd y(10);
  for (int i = 0; i < 10; ++i) y(i) = i + 1.0;
  CHECK(quantile_fit(X, y, 0.5).coefficients(0) == 5.0);
  CHECK(quantile_fit(X, y, 0.3).coefficients(0) == 3.0);

  // Property over random samples and a quantile grid.
  Rng r(17);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 15 + static_cast<int>(r.next_u64() % 30);
    Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(n, 1);
    Eigen::VectorXd v(n);
    std::vector<double> plain(n);
    for (int i = 0; i < n; ++i) {
      v(i) = r.normal() * 3.0;
      plain[i] = v(i);
    }
    for (double g : {0.1, 0.25, 0.5, 0.75, 0.9}) {
      CHECK(quantile_fit(ones, v, g).coefficients(0) ==
            empirical_quantile_lower(plain, g));
    }
  }
}

TEST_CASE("the simplex solution attains the exhaustive vertex minimum") {
  Rng r(23);
  for (int rep = 0; rep < 8; ++rep) {
    const int n = 20;
    Eigen::MatrixXd X(n, 2);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
      X(i, 0) = 1.0;
      X(i, 1) = r.normal();
      y(i) = 0.5 + 1.5 * X(i, 1) + r.normal();
    }
    for (double g : {0.25, 0.5, 0.75}) {
      auto fit = quantile_fit(X, y, g);
      const double oracle = vertex_enumeration_minimum(X, y, g);
      CHECK(std::fabs(fit.objective - oracle) < 1e-6);
      CHECK(fit.objective <= oracle + 1e-6);
    }
  }
}

TEST_CASE("quantile solutions are vertices satisfying the optimality conditions") {
  Rng r(29);
  const int n = 120, k = 3;
  Eigen::MatrixXd X(n, k);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = r.normal();
    X(i, 2) = r.uniform() * 2.0;
    y(i) = 1.0 + X(i, 1) - 0.5 * X(i, 2) + r.student_t(5);
  }
  for (double g : {0.2, 0.5, 0.8}) {
    auto fit = quantile_fit(X, y, g);
    // Exactly k interpolated observations.
    int zeros = 0, neg = 0, nonpos = 0;
    for (int i = 0; i < n; ++i) {
      if (std::fabs(fit.residuals(i)) < 1e-9) ++zeros;
      if (fit.residuals(i) < -1e-9) ++neg;
      if (fit.residuals(i) <= 1e-9) ++nonpos;
    }
    CHECK(zeros == k);
    // Residual sign counts bracket n*gamma within the basis slack.
    CHECK(neg <= n * g + k + 1e-9);
    CHECK(n * g <= nonpos + k + 1e-9);
    // Subgradient of the check loss is within the vertex bound.
    const double xmax = X.cwiseAbs().maxCoeff();
    for (int j = 0; j < k; ++j) {
      double grad = 0.0;
      for (int i = 0; i < n; ++i) {
        if (std::fabs(fit.residuals(i)) < 1e-9) continue;
        grad += X(i, j) * (g - (fit.residuals(i) < 0.0 ? 1.0 : 0.0));
      }
      CHECK(std::fabs(grad) <= k * xmax + 1e-6);
    }
    // No small coordinate perturbation improves the objective.
    for (int j = 0; j < k; ++j) {
      for (double sign : {-1.0, 1.0}) {
        Eigen::VectorXd b = fit.coefficients;
        b(j) += sign * 1e-4 * (1.0 + std::fabs(b(j)));
        CHECK(check_loss(y - X * b, g) >= fit.objective - 1e-8);
      }
    }
  }
}

TEST_CASE("quantile regression is equivariant under scaling and design shifts") {
  Rng r(37);
  const int n = 80;
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = r.normal();
    y(i) = 2.0 - X(i, 1) + r.normal();
  }
  Eigen::VectorXd c(2);
  c << 3.0, -1.25;
  const double a = 2.5;
  auto base = quantile_fit(X, y, 0.4);
  auto moved = quantile_fit(X, Eigen::VectorXd(a * y + X * c), 0.4);
  CHECK((moved.coefficients - (a * base.coefficients + c)).cwiseAbs().maxCoeff() <
        1e-9);
}

TEST_CASE("median regression tracks least squares on symmetric errors") {
  Rng r(41);
  const int n = 2000;
  Eigen::MatrixXd X(n, 3);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = r.normal();
    X(i, 2) = r.normal();
    y(i) = 0.5 + X(i, 1) + 2.0 * X(i, 2) + r.normal();
  }
  auto qr = quantile_fit(X, y, 0.5);
  auto ls = ols_fit(X, y);
  for (int j = 0; j < 3; ++j) {
    const double joint_se =
        std::sqrt(qr.covariance(j, j) + ls.covariance(j, j));
    CHECK(std::fabs(qr.coefficients(j) - ls.coefficients(j)) <= 3.0 * joint_se);
  }
}

TEST_CASE("fitted quantiles at the design mean are monotone in gamma") {
  Rng r(43);
  const int n = 500;
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = r.uniform();
    y(i) = 1.0 + 0.5 * X(i, 1) + r.normal();
  }
  Eigen::VectorXd xbar = X.colwise().mean();
  double prev = -std::numeric_limits<double>::infinity();
  for (double g : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const double fitted = xbar.dot(quantile_fit(X, y, g).coefficients);
    CHECK(fitted >= prev - 1e-9);
    prev = fitted;
  }
}

TEST_CASE("solver methods agree and the automatic switch depends on size") {
  Rng r(47);
  const int n = 300;
  Eigen::MatrixXd X(n, 3);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = r.normal();
    X(i, 2) = r.normal();
    y(i) = 1.0 - X(i, 1) + 0.25 * X(i, 2) + r.student_t(5);
  }
  auto sx = quantile_fit(X, y, 0.3, {}, QrMethod::simplex);
  auto ip = quantile_fit(X, y, 0.3, {}, QrMethod::interior_point);
  CHECK(sx.method == "simplex");
  CHECK(ip.method == "interior-point");
  CHECK((sx.coefficients - ip.coefficients).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(std::fabs(sx.objective - ip.objective) < 1e-8);
  CHECK(quantile_fit(X, y, 0.3).method == "simplex");

  const int big = 5200;
  Eigen::MatrixXd Xb(big, 2);
  Eigen::VectorXd yb(big);
  for (int i = 0; i < big; ++i) {
    Xb(i, 0) = 1.0;
    Xb(i, 1) = r.normal();
    yb(i) = 0.5 + 2.0 * Xb(i, 1) + r.normal();
  }
  auto auto_fit = quantile_fit(Xb, yb, 0.5);
  CHECK(auto_fit.method == "interior-point");
  auto forced = quantile_fit(Xb, yb, 0.5, {}, QrMethod::simplex);
  CHECK((auto_fit.coefficients - forced.coefficients).cwiseAbs().maxCoeff() <
        1e-8);
}

TEST_CASE("quantile fits validate their inputs") {
  Eigen::MatrixXd X = Eigen::MatrixXd::Ones(10, 1);
  Eigen::VectorXd y = gauss_vector(53, 10);
  CHECK_THROWS_AS(quantile_fit(X, y, 0.0), ConfigError);
  CHECK_THROWS_AS(quantile_fit(X, y, 1.0), ConfigError);
  CHECK_THROWS_AS(quantile_fit(X, y, -0.2), ConfigError);

  Eigen::MatrixXd Xbad(10, 2);
  Xbad << X, 2.0 * X;
  CHECK_THROWS_AS(quantile_fit(Xbad, y, 0.5), EstimationError);
}

TEST_CASE("kernel and bootstrap covariances are symmetric with positive diagonals") {
  Rng r(59);
  const int n = 400;
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = r.normal();
    y(i) = 1.0 + X(i, 1) + r.normal();
  }
  auto fit = quantile_fit(X, y, 0.5);
  CHECK(fit.covariance(0, 0) > 0.0);
  CHECK(fit.covariance(1, 1) > 0.0);
  CHECK(std::fabs(fit.covariance(0, 1) - fit.covariance(1, 0)) < 1e-14);

  auto bs = quantile_bootstrap_covariance(X, y, 0.5, 60, 7, Execution::serial);
  auto bp = quantile_bootstrap_covariance(X, y, 0.5, 60, 7, Execution::parallel);
  CHECK(bs == bp);  // bitwise: per-replication seeds, serial reduction
  CHECK(bs(0, 0) > 0.0);
  CHECK(bs(1, 1) > 0.0);
  CHECK(std::fabs(bs(0, 1) - bs(1, 0)) < 1e-14);
  auto other = quantile_bootstrap_covariance(X, y, 0.5, 60, 8, Execution::serial);
  CHECK(other != bs);
  // Bootstrap and kernel standard errors should be the same order.
  CHECK(std::sqrt(bs(1, 1)) < 5.0 * std::sqrt(fit.covariance(1, 1)));
  CHECK(std::sqrt(bs(1, 1)) > 0.2 * std::sqrt(fit.covariance(1, 1)));
}

// ---------------------------------------------------------------------------
// Delta method
// ---------------------------------------------------------------------------

TEST_CASE("delta method on identities reproduces the marginals") {
  Eigen::VectorXd theta(2);
  theta << 1.5, -0.5;
  Eigen::MatrixXd cov(2, 2);
  cov << 0.04, 0.01,
         0.01, 0.09;
  std::vector<DeltaComponent> t(2);
  t[0] = {DeltaComponent::Kind::identity, {0}, "a"};
  t[1] = {DeltaComponent::Kind::identity, {1}, "b"};
  auto res = delta_method(theta, cov, t);
  CHECK(res.values(0) == 1.5);
  CHECK(res.values(1) == -0.5);
  CHECK(res.std_errors(0) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(res.std_errors(1) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(res.covariance(0, 1) == doctest::Approx(0.01).epsilon(1e-14));
}

TEST_CASE("a sum of independent unit-variance terms has standard error sqrt(2)") {
  Eigen::VectorXd theta(2);
  theta << 0.7, 0.3;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(2, 2);
  std::vector<DeltaComponent> t(1);
  t[0] = {DeltaComponent::Kind::sum, {0, 1}, "total"};
  auto res = delta_method(theta, cov, t);
  CHECK(res.values(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(res.std_errors(0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("the ratio transform matches central finite differences") {
  // theta = (phi, rho); g = -phi / rho at (0.25, -0.5) is 0.5.
  Eigen::VectorXd theta(2);
  theta << 0.25, -0.5;
  Eigen::MatrixXd cov(2, 2);
  cov << 0.0016, -0.0005,
         -0.0005, 0.0025;
  std::vector<DeltaComponent> t(1);
  t[0] = {DeltaComponent::Kind::neg_ratio, {0, 1}, "beta"};
  auto res = delta_method(theta, cov, t);
  CHECK(res.values(0) == 0.5);

  // Numerical Jacobian of g(theta) = -theta0/theta1.
  auto g = [](double a, double b) { return -a / b; };
  const double h = 1e-6;
  const double j0 = (g(theta(0) + h, theta(1)) - g(theta(0) - h, theta(1))) / (2 * h);
  const double j1 = (g(theta(0), theta(1) + h) - g(theta(0), theta(1) - h)) / (2 * h);
  const double var = j0 * j0 * cov(0, 0) + 2 * j0 * j1 * cov(0, 1) +
                     j1 * j1 * cov(1, 1);
  CHECK(res.std_errors(0) == doctest::Approx(std::sqrt(var)).epsilon(1e-6));
}

TEST_CASE("block sums propagate the full covariance quadratic form") {
  Eigen::VectorXd theta = gauss_vector(61, 4);
  Eigen::MatrixXd R = gauss_design(62, 4, 4, false);
  Eigen::MatrixXd cov = R * R.transpose() + Eigen::MatrixXd::Identity(4, 4);
  std::vector<DeltaComponent> t(1);
  t[0] = {DeltaComponent::Kind::sum, {0, 1, 2, 3}, "sum"};
  auto res = delta_method(theta, cov, t);
  // Brute-force quadratic form with the all-ones gradient.
  double var = 0.0, total = 0.0;
  for (int i = 0; i < 4; ++i) {
    total += theta(i);
    for (int j = 0; j < 4; ++j) var += cov(i, j);
  }
  CHECK(res.values(0) == doctest::Approx(total).epsilon(1e-14));
  CHECK(res.std_errors(0) == doctest::Approx(std::sqrt(var)).epsilon(1e-10));
}

TEST_CASE("delta method guards its inputs") {
  Eigen::VectorXd theta(2);
  theta << 1.0, 1e-12;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(2, 2);
  std::vector<DeltaComponent> ratio(1);
  ratio[0] = {DeltaComponent::Kind::neg_ratio, {0, 1}, "bad"};
  CHECK_THROWS_AS(delta_method(theta, cov, ratio), EstimationError);

  std::vector<DeltaComponent> oob(1);
  oob[0] = {DeltaComponent::Kind::identity, {5}, "oob"};
  CHECK_THROWS_AS(delta_method(theta, cov, oob), ConfigError);
}
