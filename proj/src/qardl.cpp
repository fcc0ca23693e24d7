#include "qardl/qardl.hpp"

#include <bit>
#include <cmath>
#include <set>

#include "qardl/errors.hpp"
#include "qardl/stats.hpp"

namespace qardl {

namespace {

// Stage-1 design for the literal two-stage projection: the differenced form
// without the contemporaneous (lag-0) difference columns.
LagDesign strip_contemporaneous(const LagDesign& design) {
  std::vector<Eigen::Index> keep;
  for (std::size_t j = 0; j < design.labels.size(); ++j) {
    const auto& label = design.labels[j];
    if (label.differenced && label.lag == 0 && label.role != VariableRole::dependent) continue;
    keep.push_back(static_cast<Eigen::Index>(j));
  }
  LagDesign out;
  out.response = design.response;
  out.dates = design.dates;
  out.response_name = design.response_name;
  out.differenced_response = design.differenced_response;
  out.regressors.resize(design.regressors.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    out.regressors.col(static_cast<Eigen::Index>(j)) = design.regressors.col(keep[j]);
    out.labels.push_back(design.labels[static_cast<std::size_t>(keep[j])]);
  }
  return out;
}

// Quantile-loss minimizing projection is replaced by the paper's stated
// least-squares projection of the residual on the contemporaneous
// differences (no intercept).
std::vector<Coefficient> project_residuals(const LagDesign& design,
                                           const Eigen::VectorXd& residuals) {
  std::vector<Eigen::Index> cols;
  std::vector<std::string> names;
  for (std::size_t j = 0; j < design.labels.size(); ++j) {
    const auto& label = design.labels[j];
    if (label.differenced && label.lag == 0 && label.role != VariableRole::dependent) {
      cols.push_back(static_cast<Eigen::Index>(j));
      names.push_back(label.variable);
    }
  }
  std::vector<Coefficient> out;
  if (cols.empty()) return out;
  Eigen::MatrixXd D(design.regressors.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    D.col(static_cast<Eigen::Index>(j)) = design.regressors.col(cols[j]);
  }
  const OlsFit fit = ols_fit(D, residuals, names);
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    Coefficient c;
    c.label = "gamma_" + names[j];
    c.value = fit.coefficients(jj);
    c.std_error = std::sqrt(std::max(fit.covariance(jj, jj), 0.0));
    c.t_ratio = c.std_error > 0.0 ? c.value / c.std_error : 0.0;
    c.p_value = c.std_error > 0.0 ? normal_two_sided_p(c.t_ratio) : 1.0;
    c.stars = significance_stars(c.p_value);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

QardlFitSet fit_qardl(const AlignedPanel& panel, const ModelSpec& spec,
                      const QardlOptions& options) {
  for (double g : options.quantiles) {
    if (!(g > 0.0 && g < 1.0)) {
      throw ConfigError("qardl: quantiles must lie strictly inside (0,1)");
    }
  }
  {
    std::set<double> unique(options.quantiles.begin(), options.quantiles.end());
    if (unique.size() != options.quantiles.size()) {
      throw ConfigError("qardl: duplicate quantile requested");
    }
  }
  if (options.se == SeMethod::bootstrap && options.bootstrap_replications < 2) {
    throw ConfigError("qardl: bootstrap needs at least 2 replications");
  }

  const LagDesign full = build_lag_design(panel, spec, DesignForm::ecm_differenced);
  const LagDesign design = options.two_stage_projection ? strip_contemporaneous(full) : full;
  std::vector<std::string> names;
  for (const auto& label : design.labels) names.push_back(to_string(label));

  QardlFitSet set;
  set.spec = spec;
  set.design_labels = design.labels;
  set.effective_n = design.rows();
  set.records.resize(options.quantiles.size());

  parallel_for(options.quantiles.size(), options.exec, [&](std::size_t i) {
    const double gamma = options.quantiles[i];
    QardlRecord& rec = set.records[i];
    rec.gamma = gamma;
    try {
      const QrFit fit = quantile_fit(design.regressors, design.response, gamma, names);
      Eigen::MatrixXd cov = fit.covariance;
      if (options.se == SeMethod::bootstrap) {
        // Seed derives from the gamma value itself so a record never
        // depends on which other quantiles were requested alongside it.
        const auto stream = std::bit_cast<std::uint64_t>(gamma);
        cov = quantile_bootstrap_covariance(
            design.regressors, design.response, gamma,
            options.bootstrap_replications, derive_seed(options.seed, stream),
            options.exec);
      }
      rec.coefficients =
          extract_ecm_coefficients(design, fit.coefficients, cov,
                                   /*throw_on_zero_rho=*/false);
      if (options.two_stage_projection) {
        rec.coefficients.projection = project_residuals(full, fit.residuals);
      }
      if (rec.coefficients.no_error_correction) {
        rec.coefficients.warning += " (gamma = " + std::to_string(gamma) + ")";
      }
      rec.objective = fit.objective;
      rec.iterations = fit.iterations;
      rec.method = fit.method;
      rec.ok = true;
    } catch (const std::exception& e) {
      rec.ok = false;
      rec.error = e.what();
    }
  });
  return set;
}

std::vector<BandRow> confidence_bands(const QardlFitSet& fits, double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw ConfigError("confidence_bands: level must lie inside (0,1)");
  }
  const double z = normal_quantile(0.5 + level / 2.0);
  std::vector<BandRow> rows;
  auto emit = [&](const Coefficient& c, double gamma) {
    BandRow row;
    row.parameter = c.label;
    row.gamma = gamma;
    row.estimate = c.value;
    row.lo = c.value - z * c.std_error;
    row.hi = c.value + z * c.std_error;
    row.defined = c.defined;
    rows.push_back(std::move(row));
  };
  for (const auto& rec : fits.records) {
    if (!rec.ok) continue;
    const auto& c = rec.coefficients;
    Coefficient alpha;
    alpha.label = "alpha";
    alpha.value = c.alpha;
    alpha.std_error = c.alpha_se;
    emit(alpha, rec.gamma);
    emit(c.rho_star, rec.gamma);
    for (const auto& x : c.long_run) emit(x, rec.gamma);
    for (const auto& x : c.cumulative) emit(x, rec.gamma);
    for (const auto& x : c.short_run) emit(x, rec.gamma);
  }
  return rows;
}

}  // namespace qardl
