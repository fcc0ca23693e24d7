#include "qardl/unit_root.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "qardl/errors.hpp"
#include "qardl/ols.hpp"
#include "qardl/stats.hpp"

namespace qardl {

namespace {

// Response-surface constants for the ADF t-ratio: cv = b0 + b1/T + b2/T^2
// + b3/T^3, with T the estimation sample size. One row per significance
// level, constant and constant+trend cases.
struct SurfaceRow {
  double level;
  double b0, b1, b2, b3;
};

constexpr SurfaceRow kAdfConstant[] = {
    {0.01, -3.43035, -6.5393, -16.786, -79.433},
    {0.05, -2.86154, -2.8903, -4.234, -40.040},
    {0.10, -2.56677, -1.5384, -2.809, 0.0},
};

constexpr SurfaceRow kAdfTrend[] = {
    {0.01, -3.95877, -9.0531, -28.428, -134.155},
    {0.05, -3.41049, -4.3904, -9.036, -45.374},
    {0.10, -3.12705, -2.5856, -3.925, -22.380},
};

// Tabulated normalized-bias (Z_rho) critical values; interpolated linearly
// in 1/T between tabulated sample sizes (the last row is the limit). The
// tabulation is coarse, so downstream p-values are flagged approximate.
struct ZRow {
  double inv_t;  // 1/T of the tabulated row, 0 for the limiting case
  double cv01, cv05, cv10;
};

constexpr ZRow kZConstant[] = {
    {1.0 / 25.0, -17.2, -12.5, -10.2},  {1.0 / 50.0, -18.9, -13.3, -10.7},
    {1.0 / 100.0, -19.8, -13.7, -11.0}, {1.0 / 250.0, -20.3, -14.0, -11.2},
    {1.0 / 500.0, -20.5, -14.0, -11.2}, {0.0, -20.7, -14.1, -11.3},
};

constexpr ZRow kZTrend[] = {
    {1.0 / 25.0, -22.5, -17.9, -15.6},  {1.0 / 50.0, -25.7, -19.8, -16.8},
    {1.0 / 100.0, -27.4, -20.7, -17.5}, {1.0 / 250.0, -28.4, -21.3, -17.9},
    {1.0 / 500.0, -28.9, -21.5, -18.1}, {0.0, -29.5, -21.8, -18.3},
};

std::map<double, double> adf_critical_values(Deterministic det, int sample) {
  const SurfaceRow* rows = det == Deterministic::constant ? kAdfConstant : kAdfTrend;
  const double t = static_cast<double>(sample);
  std::map<double, double> cvs;
  for (int i = 0; i < 3; ++i) {
    const SurfaceRow& r = rows[i];
    cvs[r.level] = r.b0 + r.b1 / t + r.b2 / (t * t) + r.b3 / (t * t * t);
  }
  return cvs;
}

std::map<double, double> pp_critical_values(Deterministic det, int sample) {
  const ZRow* rows = det == Deterministic::constant ? kZConstant : kZTrend;
  const int n_rows = 6;
  const double x = 1.0 / static_cast<double>(std::max(sample, 25));
  // Rows are ordered by decreasing 1/T; locate the bracketing pair.
  int hi = 0;
  while (hi < n_rows - 1 && rows[hi + 1].inv_t > x) ++hi;
  const ZRow& a = rows[hi];
  const ZRow& b = rows[std::min(hi + 1, n_rows - 1)];
  double w = 0.0;
  if (a.inv_t != b.inv_t) w = (a.inv_t - x) / (a.inv_t - b.inv_t);
  w = std::clamp(w, 0.0, 1.0);
  std::map<double, double> cvs;
  cvs[0.01] = a.cv01 + w * (b.cv01 - a.cv01);
  cvs[0.05] = a.cv05 + w * (b.cv05 - a.cv05);
  cvs[0.10] = a.cv10 + w * (b.cv10 - a.cv10);
  return cvs;
}

std::optional<double> strongest_rejection(double stat,
                                          const std::map<double, double>& cvs) {
  for (double level : {0.01, 0.05, 0.10}) {
    if (stat < cvs.at(level)) return level;
  }
  return std::nullopt;
}

// Maps the statistic to a p-value by piecewise-linear interpolation through
// the three (critical value, level) knots in probit space, extrapolating
// with the end segments. Coarse by construction; only the ordering against
// the tabulated levels is exact.
double approximate_p_value(double stat, const std::map<double, double>& cvs) {
  const double x1 = cvs.at(0.01), x2 = cvs.at(0.05), x3 = cvs.at(0.10);
  const double z1 = normal_quantile(0.01), z2 = normal_quantile(0.05),
               z3 = normal_quantile(0.10);
  double z;
  if (stat <= x2) {
    z = z1 + (stat - x1) * (z2 - z1) / (x2 - x1);
  } else {
    z = z2 + (stat - x2) * (z3 - z2) / (x3 - x2);
  }
  return std::clamp(normal_cdf(z), 1e-6, 0.999999);
}

int default_adf_cap(int n) {
  return static_cast<int>(std::floor(12.0 * std::pow(n / 100.0, 0.25)));
}

int default_pp_bandwidth(int t) {
  return static_cast<int>(std::floor(4.0 * std::pow(t / 100.0, 2.0 / 9.0)));
}

// Dickey-Fuller regression for lag order L over rows t = start .. n-1:
//   dy_t = c [+ trend] + delta*y_{t-1} + sum_i a_i dy_{t-i} + e_t.
struct AdfRegression {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  int level_column = 0;
};

AdfRegression build_adf_regression(const std::vector<double>& v, int lag,
                                   Deterministic det, int start) {
  const int n = static_cast<int>(v.size());
  const int rows = n - start;
  const bool trend = det == Deterministic::constant_trend;
  const int k = (trend ? 2 : 1) + 1 + lag;
  AdfRegression reg;
  reg.x.resize(rows, k);
  reg.y.resize(rows);
  reg.level_column = trend ? 2 : 1;
  for (int r = 0; r < rows; ++r) {
    const int t = start + r;
    int c = 0;
    reg.x(r, c++) = 1.0;
    if (trend) reg.x(r, c++) = static_cast<double>(r + 1);
    reg.x(r, c++) = v[t - 1];
    for (int i = 1; i <= lag; ++i) reg.x(r, c++) = v[t - i] - v[t - i - 1];
    reg.y(r) = v[t] - v[t - 1];
  }
  return reg;
}

double regression_ic(const OlsFit& fit, int rows, int k, LagSelection sel) {
  const double rss = fit.rss();
  const double t = static_cast<double>(rows);
  const double penalty = sel == LagSelection::aic ? 2.0 * k : k * std::log(t);
  return t * std::log(rss / t) + penalty;
}

}  // namespace

UnitRootResult adf_test(const ObservationSeries& s, Deterministic det,
                        int max_lag, LagSelection selection) {
  const int n = static_cast<int>(s.size());
  const int cap = max_lag >= 0 ? max_lag : default_adf_cap(n);
  if (cap < 0) throw ConfigError("adf: negative lag cap");
  if (n <= cap + 10) {
    throw EstimationError("adf: series '" + s.name + "' too short for lag cap " +
                          std::to_string(cap));
  }
  const std::vector<double>& v = s.values;

  int lag = cap;
  if (selection != LagSelection::fixed) {
    // Compare information criteria on the sample common to every candidate
    // (rows t = cap+1 ..), so the criteria are evaluated on identical data.
    double best = std::numeric_limits<double>::infinity();
    int best_lag = 0;
    const int start = cap + 1;
    const int rows = n - start;
    for (int l = 0; l <= cap; ++l) {
      AdfRegression reg = build_adf_regression(v, l, det, start);
      OlsFit fit = ols_fit(reg.x, reg.y);
      const double ic = regression_ic(fit, rows, static_cast<int>(reg.x.cols()), selection);
      if (ic < best) {
        best = ic;
        best_lag = l;
      }
    }
    lag = best_lag;
  }

  // Refit the winning order on its own full sample.
  AdfRegression reg = build_adf_regression(v, lag, det, lag + 1);
  OlsFit fit = ols_fit(reg.x, reg.y);
  const int rows = static_cast<int>(reg.x.rows());
  const double se = std::sqrt(std::max(fit.covariance(reg.level_column, reg.level_column), 0.0));
  if (!(se > 0.0)) {
    throw EstimationError("adf: zero standard error on the lagged level for series '" +
                          s.name + "'");
  }

  UnitRootResult result;
  result.test = UnitRootTest::adf;
  result.statistic = fit.coefficients(reg.level_column) / se;
  result.z_t = result.statistic;
  result.lag_or_bandwidth = lag;
  result.deterministic = det;
  result.critical_values = adf_critical_values(det, rows);
  result.reject_at = strongest_rejection(result.statistic, result.critical_values);
  result.p_value = approximate_p_value(result.statistic, result.critical_values);
  return result;
}

UnitRootResult pp_test(const ObservationSeries& s, Deterministic det, int bandwidth) {
  const int n = static_cast<int>(s.size());
  if (n <= 20) {
    throw EstimationError("pp: series '" + s.name + "' too short (need more than 20 observations)");
  }
  const std::vector<double>& v = s.values;
  const int t_obs = n - 1;  // regression rows: y_t on its own lag
  const bool trend = det == Deterministic::constant_trend;
  const int k = trend ? 3 : 2;

  Eigen::MatrixXd x(t_obs, k);
  Eigen::VectorXd y(t_obs);
  const int rho_col = trend ? 2 : 1;
  for (int r = 0; r < t_obs; ++r) {
    int c = 0;
    x(r, c++) = 1.0;
    if (trend) x(r, c++) = static_cast<double>(r + 1);
    x(r, c++) = v[r];
    y(r) = v[r + 1];
  }
  OlsFit fit = ols_fit(x, y);

  const int m = bandwidth >= 0 ? bandwidth : default_pp_bandwidth(t_obs);
  const Eigen::VectorXd& e = fit.residuals;
  const double tt = static_cast<double>(t_obs);

  // Bartlett-kernel long-run variance of the residuals.
  std::vector<double> gamma(static_cast<size_t>(m) + 1, 0.0);
  for (int j = 0; j <= m; ++j) {
    double acc = 0.0;
    for (int t = j; t < t_obs; ++t) acc += e(t) * e(t - j);
    gamma[static_cast<size_t>(j)] = acc / tt;
  }
  double lambda2 = gamma[0];
  for (int j = 1; j <= m; ++j) {
    lambda2 += 2.0 * (1.0 - j / (m + 1.0)) * gamma[static_cast<size_t>(j)];
  }
  lambda2 = std::max(lambda2, 1e-12 * gamma[0]);
  if (!(lambda2 > 0.0)) {
    throw EstimationError("pp: degenerate long-run variance for series '" + s.name + "'");
  }

  const double s2 = fit.rss() / fit.dof;
  const double rho_hat = fit.coefficients(rho_col);
  const double var_rho = std::max(fit.covariance(rho_col, rho_col), 0.0);
  if (!(var_rho > 0.0)) {
    throw EstimationError("pp: zero standard error on the autoregressive term for series '" +
                          s.name + "'");
  }
  const double se_rho = std::sqrt(var_rho);
  const double t_rho = (rho_hat - 1.0) / se_rho;

  const double correction = lambda2 - gamma[0];
  const double z_rho = tt * (rho_hat - 1.0) - 0.5 * (tt * tt * var_rho / s2) * correction;
  const double z_t = std::sqrt(gamma[0] / lambda2) * t_rho -
                     0.5 * (correction / std::sqrt(lambda2)) * (tt * se_rho / std::sqrt(s2));

  UnitRootResult result;
  result.test = UnitRootTest::pp;
  result.statistic = z_rho;
  result.z_t = z_t;
  result.lag_or_bandwidth = m;
  result.deterministic = det;
  result.critical_values = pp_critical_values(det, t_obs);
  result.reject_at = strongest_rejection(result.statistic, result.critical_values);
  result.p_value = approximate_p_value(result.statistic, result.critical_values);
  return result;
}

}  // namespace qardl
