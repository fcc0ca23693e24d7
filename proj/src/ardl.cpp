#include "qardl/ardl.hpp"

#include <cmath>
#include <limits>

#include "qardl/delta_method.hpp"
#include "qardl/errors.hpp"
#include "qardl/stats.hpp"

namespace qardl {

namespace {

Coefficient make_coefficient(std::string label, double value, double variance) {
  Coefficient c;
  c.label = std::move(label);
  c.value = value;
  c.std_error = std::sqrt(std::max(variance, 0.0));
  c.t_ratio = c.std_error > 0.0 ? value / c.std_error
                                : std::numeric_limits<double>::infinity();
  c.p_value = c.std_error > 0.0 ? normal_two_sided_p(c.t_ratio) : 0.0;
  c.stars = significance_stars(c.p_value);
  return c;
}

double information_criterion(double rss, double t, double k, Criterion which) {
  const double penalty = which == Criterion::aic ? 2.0 * k : k * std::log(t);
  return t * std::log(rss / t) + penalty;
}

// Drops the first `from` dates of every column.
AlignedPanel slice_panel(const AlignedPanel& panel, std::size_t from) {
  AlignedPanel out;
  out.dates.assign(panel.dates.begin() + static_cast<long>(from), panel.dates.end());
  for (const auto& col : panel.columns) {
    PanelColumn c;
    c.name = col.name;
    c.role = col.role;
    c.values.assign(col.values.begin() + static_cast<long>(from), col.values.end());
    out.columns.push_back(std::move(c));
  }
  return out;
}

}  // namespace

std::string short_run_symbol(VariableRole role) {
  switch (role) {
    case VariableRole::dependent: return "phi";
    case VariableRole::epu: return "omega";
    case VariableRole::sp500: return "lambda";
    case VariableRole::csi300: return "theta";
    case VariableRole::interest: return "psi";
    case VariableRole::panic: return "delta";
  }
  return "?";
}

EcmCoefficients extract_ecm_coefficients(const LagDesign& design,
                                         const Eigen::VectorXd& coefficients,
                                         const Eigen::MatrixXd& covariance,
                                         bool throw_on_zero_rho) {
  const auto& labels = design.labels;
  const auto k = static_cast<int>(labels.size());

  int idx_alpha = -1;
  int idx_rho = -1;
  std::vector<int> level_idx;  // regressor lag-1 levels, canonical order
  std::vector<int> dep_diff_idx;
  std::vector<std::vector<int>> reg_diff_idx;  // per regressor, lag ascending
  std::vector<std::string> reg_names;
  std::vector<VariableRole> reg_roles;

  auto regressor_slot = [&](const ColumnLabel& label) {
    for (std::size_t r = 0; r < reg_roles.size(); ++r) {
      if (reg_roles[r] == label.role) return r;
    }
    reg_roles.push_back(label.role);
    reg_names.push_back(label.variable);
    reg_diff_idx.emplace_back();
    level_idx.push_back(-1);
    return reg_roles.size() - 1;
  };

  for (int j = 0; j < k; ++j) {
    const ColumnLabel& label = labels[static_cast<std::size_t>(j)];
    if (label.intercept) {
      idx_alpha = j;
    } else if (label.role == VariableRole::dependent) {
      if (label.differenced) {
        dep_diff_idx.push_back(j);
      } else if (label.lag == 1) {
        idx_rho = j;
      }
    } else {
      const std::size_t slot = regressor_slot(label);
      if (label.differenced) {
        reg_diff_idx[slot].push_back(j);
      } else if (label.lag == 1) {
        level_idx[slot] = j;
      }
    }
  }
  if (idx_alpha < 0 || idx_rho < 0) {
    throw EstimationError("ecm extraction: design lacks intercept or lag-1 dependent level");
  }

  EcmCoefficients out;
  out.alpha = coefficients(idx_alpha);
  out.alpha_se = std::sqrt(std::max(covariance(idx_alpha, idx_alpha), 0.0));
  out.rho_star = make_coefficient("rho*", coefficients(idx_rho), covariance(idx_rho, idx_rho));

  for (std::size_t r = 0; r < reg_roles.size(); ++r) {
    if (level_idx[r] < 0) {
      throw EstimationError("ecm extraction: missing lag-1 level for " + reg_names[r]);
    }
    out.level_terms.push_back(make_coefficient(
        to_string(labels[static_cast<std::size_t>(level_idx[r])]),
        coefficients(level_idx[r]), covariance(level_idx[r], level_idx[r])));
  }

  // Long-run beta_X = -phi_X / rho via the delta method.
  const double rho = coefficients(idx_rho);
  if (std::fabs(rho) < 1e-10) {
    if (throw_on_zero_rho) {
      throw EstimationError(
          "ecm extraction: rho is within 1e-10 of zero; no error-correction representation");
    }
    for (std::size_t r = 0; r < reg_roles.size(); ++r) {
      Coefficient c;
      c.label = "beta_" + reg_names[r];
      c.value = std::numeric_limits<double>::quiet_NaN();
      c.std_error = std::numeric_limits<double>::quiet_NaN();
      c.t_ratio = std::numeric_limits<double>::quiet_NaN();
      c.p_value = std::numeric_limits<double>::quiet_NaN();
      c.defined = false;
      out.long_run.push_back(std::move(c));
    }
  } else {
    std::vector<DeltaComponent> ratios;
    for (std::size_t r = 0; r < reg_roles.size(); ++r) {
      ratios.push_back({DeltaComponent::Kind::neg_ratio,
                        {level_idx[r], idx_rho},
                        "beta_" + reg_names[r]});
    }
    const DeltaResult lr = delta_method(coefficients, covariance, ratios);
    for (std::size_t r = 0; r < reg_roles.size(); ++r) {
      out.long_run.push_back(make_coefficient(ratios[r].label, lr.values(static_cast<Eigen::Index>(r)),
                                              lr.covariance(static_cast<Eigen::Index>(r),
                                                            static_cast<Eigen::Index>(r))));
    }
  }

  // Cumulative short-run sums, one per variable with difference terms.
  std::vector<DeltaComponent> sums;
  if (!dep_diff_idx.empty()) {
    sums.push_back({DeltaComponent::Kind::sum, dep_diff_idx,
                    short_run_symbol(VariableRole::dependent) + "*"});
  }
  for (std::size_t r = 0; r < reg_roles.size(); ++r) {
    if (!reg_diff_idx[r].empty()) {
      sums.push_back({DeltaComponent::Kind::sum, reg_diff_idx[r],
                      short_run_symbol(reg_roles[r]) + "*"});
    }
  }
  if (!sums.empty()) {
    const DeltaResult cs = delta_method(coefficients, covariance, sums);
    for (std::size_t i = 0; i < sums.size(); ++i) {
      out.cumulative.push_back(make_coefficient(sums[i].label, cs.values(static_cast<Eigen::Index>(i)),
                                                cs.covariance(static_cast<Eigen::Index>(i),
                                                              static_cast<Eigen::Index>(i))));
    }
  }

  // Individual difference terms, labeled phi_1, omega_0, ...
  auto push_short_run = [&](VariableRole role, const std::vector<int>& idx) {
    for (int j : idx) {
      const ColumnLabel& label = labels[static_cast<std::size_t>(j)];
      out.short_run.push_back(make_coefficient(
          short_run_symbol(role) + "_" + std::to_string(label.lag),
          coefficients(j), covariance(j, j)));
    }
  };
  push_short_run(VariableRole::dependent, dep_diff_idx);
  for (std::size_t r = 0; r < reg_roles.size(); ++r) push_short_run(reg_roles[r], reg_diff_idx[r]);

  // Contemporaneous-difference loadings are the projection coefficients.
  for (std::size_t r = 0; r < reg_roles.size(); ++r) {
    for (int j : reg_diff_idx[r]) {
      if (labels[static_cast<std::size_t>(j)].lag != 0) continue;
      out.projection.push_back(make_coefficient("gamma_" + reg_names[r],
                                                coefficients(j), covariance(j, j)));
    }
  }

  if (out.rho_star.value >= 0.0 || out.rho_star.p_value >= 0.10) {
    out.no_error_correction = true;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "rho* = %.4f (t = %.2f) is not negative and significant; "
                  "no error-correction behavior at this specification",
                  out.rho_star.value, out.rho_star.t_ratio);
    out.warning = buf;
  }
  return out;
}

ArdlFit fit_linear_ardl(const AlignedPanel& panel, const ModelSpec& spec) {
  ArdlFit fit;
  fit.spec = spec;
  fit.panel = panel;
  fit.design = build_lag_design(panel, spec, DesignForm::levels);
  std::vector<std::string> names;
  names.reserve(fit.design.labels.size());
  for (const auto& label : fit.design.labels) names.push_back(to_string(label));
  fit.ols = ols_fit(fit.design.regressors, fit.design.response, names);
  const auto t = static_cast<double>(fit.design.rows());
  const auto k = static_cast<double>(fit.design.cols());
  fit.aic = information_criterion(fit.ols.rss(), t, k, Criterion::aic);
  fit.bic = information_criterion(fit.ols.rss(), t, k, Criterion::bic);
  return fit;
}

EcmFit to_ecm(const ArdlFit& fit) {
  const LagDesign design = build_lag_design(fit.panel, fit.spec, DesignForm::ecm_differenced);
  std::vector<std::string> names;
  names.reserve(design.labels.size());
  for (const auto& label : design.labels) names.push_back(to_string(label));
  const OlsFit ols = ols_fit(design.regressors, design.response, names);

  EcmFit ecm;
  ecm.spec = fit.spec;
  ecm.coefficients =
      extract_ecm_coefficients(design, ols.coefficients, ols.covariance,
                               /*throw_on_zero_rho=*/true);
  ecm.residuals = ols.residuals;
  ecm.dates = design.dates;
  const auto t = static_cast<double>(design.rows());
  const auto k = static_cast<double>(design.cols());
  ecm.aic = information_criterion(ols.rss(), t, k, Criterion::aic);
  ecm.bic = information_criterion(ols.rss(), t, k, Criterion::bic);
  return ecm;
}

ModelSpec select_lags(const AlignedPanel& panel, int max_p, int max_q,
                      Criterion criterion, Execution exec) {
  if (max_p < 1 || max_q < 0) {
    throw ConfigError("select_lags: need max_p >= 1 and max_q >= 0");
  }
  std::vector<VariableRole> roles;
  for (VariableRole role : regressor_roles()) {
    if (panel.has_role(role)) roles.push_back(role);
  }
  const std::size_t n_roles = roles.size();

  // Enumerate the full grid; candidate index decodes to (p, q...).
  std::size_t count = static_cast<std::size_t>(max_p);
  for (std::size_t r = 0; r < n_roles; ++r) count *= static_cast<std::size_t>(max_q + 1);
  auto decode = [&](std::size_t c) {
    ModelSpec spec;
    spec.p = static_cast<int>(c % static_cast<std::size_t>(max_p)) + 1;
    c /= static_cast<std::size_t>(max_p);
    for (VariableRole role : roles) {
      spec.q[role] = static_cast<int>(c % static_cast<std::size_t>(max_q + 1));
      c /= static_cast<std::size_t>(max_q + 1);
    }
    return spec;
  };

  // Common truncated sample: align every candidate on the largest offset.
  const int offset_common = std::max(max_p, max_q);
  if (panel.size() <= static_cast<std::size_t>(offset_common) + 2) {
    throw EstimationError("select_lags: panel too short for the requested lag caps");
  }

  std::vector<double> ic(count, std::numeric_limits<double>::infinity());
  parallel_for(count, exec, [&](std::size_t c) {
    const ModelSpec spec = decode(c);
    const auto drop = static_cast<std::size_t>(offset_common - spec.max_lag());
    try {
      const AlignedPanel view = slice_panel(panel, drop);
      const LagDesign design = build_lag_design(view, spec, DesignForm::levels);
      const OlsFit fit = ols_fit(design.regressors, design.response);
      ic[c] = information_criterion(fit.rss(), static_cast<double>(design.rows()),
                                    static_cast<double>(design.cols()), criterion);
    } catch (const EstimationError&) {
      // leave +inf: candidate unusable (e.g. collinear lags)
    }
  });

  std::size_t best = count;
  auto better = [&](std::size_t a, std::size_t b) {
    if (ic[a] != ic[b]) return ic[a] < ic[b];
    const ModelSpec sa = decode(a);
    const ModelSpec sb = decode(b);
    int ta = sa.p, tb = sb.p;
    for (VariableRole role : roles) {
      ta += sa.q_for(role);
      tb += sb.q_for(role);
    }
    if (ta != tb) return ta < tb;
    if (sa.p != sb.p) return sa.p < sb.p;
    for (VariableRole role : roles) {
      if (sa.q_for(role) != sb.q_for(role)) return sa.q_for(role) < sb.q_for(role);
    }
    return false;
  };
  for (std::size_t c = 0; c < count; ++c) {
    if (!std::isfinite(ic[c])) continue;
    if (best == count || better(c, best)) best = c;
  }
  if (best == count) {
    throw EstimationError("select_lags: every candidate specification failed to fit");
  }
  return decode(best);
}

}  // namespace qardl
