#include "qardl/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "qardl/ardl.hpp"
#include "qardl/errors.hpp"
#include "qardl/qardl.hpp"
#include "qardl/stats.hpp"

namespace qardl {

namespace {

constexpr int kBurnIn = 200;
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string gamma_suffix(double gamma) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "@%g", gamma);
  return buf;
}

}  // namespace

ModelSpec DgpSpec::truth_spec() const {
  ModelSpec spec;
  spec.p = static_cast<int>(dep_short_run.size()) + 1;
  const auto& roles = regressor_roles();
  for (std::size_t x = 0; x < beta.size(); ++x) {
    const int q = x < reg_short_run.size() ? static_cast<int>(reg_short_run[x].size()) : 0;
    spec.q[roles[x]] = q;
  }
  return spec;
}

void DgpSpec::validate() const {
  if (!(rho > -1.0 && rho < 0.0)) {
    throw ConfigError("dgp: rho must lie in (-1, 0) for a stable error-correction process");
  }
  if (n < 100) throw ConfigError("dgp: n must be >= 100");
  if (beta.empty() || beta.size() > regressor_roles().size()) {
    throw ConfigError("dgp: between 1 and 5 regressors required");
  }
  if (reg_short_run.size() > beta.size()) {
    throw ConfigError("dgp: more short-run coefficient sets than regressors");
  }
  double dep_mass = 0.0;
  for (double c : dep_short_run) dep_mass += std::fabs(c);
  if (dep_mass >= 1.0) {
    throw ConfigError("dgp: |phi| mass >= 1 makes the difference recursion unstable");
  }
  if (sigma < 0.0) throw ConfigError("dgp: sigma must be >= 0");
  if (error == ErrorKind::student_t && t_df < 3) {
    throw ConfigError("dgp: t errors need df >= 3");
  }
  if (error == ErrorKind::location_scale) {
    if (scale_regressor < 0 || static_cast<std::size_t>(scale_regressor) >= beta.size()) {
      throw ConfigError("dgp: scale_regressor out of range");
    }
    if (!(scale_slope >= 0.0 && scale_slope * 2.0 * regressor_sigma < 1.0)) {
      throw ConfigError(
          "dgp: need 0 <= scale_slope and scale_slope * 2 * regressor_sigma < 1 "
          "so the error scale stays positive (increments truncated at 2 sd)");
    }
    if (regressor_process != RegressorProcess::random_walk) {
      throw ConfigError("dgp: the location-scale design requires random-walk regressors");
    }
  }
  if (regressor_process == RegressorProcess::ar1 && std::fabs(ar1_coefficient) >= 1.0) {
    throw ConfigError("dgp: AR(1) regressor coefficient must satisfy |a| < 1");
  }
}

AlignedPanel simulate_panel(const DgpSpec& dgp) {
  dgp.validate();
  const std::size_t K = dgp.regressor_count();
  const int total = dgp.n + kBurnIn;
  Rng rng(dgp.seed);

  // Regressor increments first, then levels; the location-scale driver uses
  // truncated-normal increments so the error scale stays positive.
  std::vector<std::vector<double>> dx(K), x(K);
  for (std::size_t j = 0; j < K; ++j) {
    dx[j].resize(static_cast<std::size_t>(total));
    x[j].resize(static_cast<std::size_t>(total));
  }
  std::vector<double> eps(static_cast<std::size_t>(total));
  for (int t = 0; t < total; ++t) {
    for (std::size_t j = 0; j < K; ++j) {
      const bool truncated = dgp.error == ErrorKind::location_scale &&
                             static_cast<int>(j) == dgp.scale_regressor;
      const double eta =
          dgp.regressor_sigma * (truncated ? rng.truncated_normal(2.0) : rng.normal());
      if (t == 0) {
        x[j][0] = eta;
        dx[j][0] = eta;
      } else if (dgp.regressor_process == RegressorProcess::random_walk) {
        x[j][static_cast<std::size_t>(t)] = x[j][static_cast<std::size_t>(t - 1)] + eta;
        dx[j][static_cast<std::size_t>(t)] = eta;
      } else {
        x[j][static_cast<std::size_t>(t)] =
            dgp.ar1_coefficient * x[j][static_cast<std::size_t>(t - 1)] + eta;
        dx[j][static_cast<std::size_t>(t)] =
            x[j][static_cast<std::size_t>(t)] - x[j][static_cast<std::size_t>(t - 1)];
      }
    }
    double u;
    switch (dgp.error) {
      case ErrorKind::gaussian: u = rng.normal(); break;
      case ErrorKind::student_t: u = rng.student_t(dgp.t_df); break;
      case ErrorKind::location_scale:
        u = (1.0 + dgp.scale_slope *
                       dx[static_cast<std::size_t>(dgp.scale_regressor)][static_cast<std::size_t>(t)]) *
            rng.normal();
        break;
      default: u = 0.0; break;
    }
    eps[static_cast<std::size_t>(t)] = dgp.sigma * u;
  }

  // Dependent recursion from the error-correction form, started at the
  // steady state of the equilibrium error.
  std::vector<double> y(static_cast<std::size_t>(total));
  std::vector<double> dy(static_cast<std::size_t>(total), 0.0);
  const int p_lags = static_cast<int>(dgp.dep_short_run.size());
  {
    double eq0 = 0.0;
    for (std::size_t j = 0; j < K; ++j) eq0 += dgp.beta[j] * x[j][0];
    y[0] = eq0 - dgp.alpha / dgp.rho;
  }
  for (int t = 1; t < total; ++t) {
    const auto tt = static_cast<std::size_t>(t);
    double eq = y[tt - 1];
    for (std::size_t j = 0; j < K; ++j) eq -= dgp.beta[j] * x[j][tt - 1];
    double d = dgp.alpha + dgp.rho * eq + eps[tt];
    for (int i = 1; i <= p_lags; ++i) {
      if (t - i >= 1) d += dgp.dep_short_run[static_cast<std::size_t>(i - 1)] * dy[tt - static_cast<std::size_t>(i)];
    }
    for (std::size_t j = 0; j < dgp.reg_short_run.size(); ++j) {
      const auto& w = dgp.reg_short_run[j];
      for (std::size_t i = 0; i < w.size(); ++i) {
        if (t >= static_cast<int>(i)) d += w[i] * dx[j][tt - i];
      }
    }
    dy[tt] = d;
    y[tt] = y[tt - 1] + d;
  }

  AlignedPanel panel;
  panel.dates.reserve(static_cast<std::size_t>(dgp.n));
  const std::int64_t day0 = days_from_civil(Date{2000, 1, 1});
  for (int t = 0; t < dgp.n; ++t) {
    panel.dates.push_back(civil_from_days(day0 + t));
  }
  auto take = [&](const std::vector<double>& v) {
    return std::vector<double>(v.begin() + kBurnIn, v.end());
  };
  panel.columns.push_back({"Y", VariableRole::dependent, take(y)});
  const auto& roles = regressor_roles();
  for (std::size_t j = 0; j < K; ++j) {
    panel.columns.push_back({"X" + std::to_string(j + 1), roles[j], take(x[j])});
  }
  return panel;
}

namespace {

struct TrackedParameter {
  std::string label;
  double truth;
};

// Parameter list (and the truths the DGP implies) for one estimator pass.
std::vector<TrackedParameter> tracked_parameters(const DgpSpec& dgp,
                                                 Estimator estimator,
                                                 const std::vector<double>& quantiles) {
  const auto& roles = regressor_roles();
  const std::size_t K = dgp.regressor_count();

  auto base = [&](double gamma, bool quantile_pass) {
    std::vector<TrackedParameter> out;
    // Intercept: shifts with the error quantile for gaussian-core errors.
    double alpha_truth = dgp.alpha;
    if (quantile_pass) {
      if (dgp.error == ErrorKind::gaussian || dgp.error == ErrorKind::location_scale) {
        alpha_truth += dgp.sigma * normal_quantile(gamma);
      } else {
        alpha_truth = kNan;
      }
    }
    out.push_back({"alpha", alpha_truth});
    out.push_back({"rho*", dgp.rho});
    for (std::size_t j = 0; j < K; ++j) {
      out.push_back({"beta_X" + std::to_string(j + 1), dgp.beta[j]});
    }
    for (std::size_t i = 0; i < dgp.dep_short_run.size(); ++i) {
      out.push_back({short_run_symbol(VariableRole::dependent) + "_" + std::to_string(i + 1),
                     dgp.dep_short_run[i]});
    }
    for (std::size_t j = 0; j < K; ++j) {
      const std::size_t terms =
          j < dgp.reg_short_run.size() ? std::max<std::size_t>(dgp.reg_short_run[j].size(), 1) : 1;
      for (std::size_t i = 0; i < terms; ++i) {
        double truth = j < dgp.reg_short_run.size() && i < dgp.reg_short_run[j].size()
                           ? dgp.reg_short_run[j][i]
                           : 0.0;
        if (quantile_pass && i == 0 && dgp.error == ErrorKind::location_scale &&
            static_cast<int>(j) == dgp.scale_regressor) {
          truth += dgp.sigma * dgp.scale_slope * normal_quantile(gamma);
        }
        out.push_back({short_run_symbol(roles[j]) + "_" + std::to_string(i), truth});
      }
    }
    return out;
  };

  if (estimator == Estimator::ardl) return base(0.5, false);
  std::vector<TrackedParameter> out;
  for (double gamma : quantiles) {
    for (auto& p : base(gamma, true)) {
      out.push_back({p.label + gamma_suffix(gamma), p.truth});
    }
  }
  return out;
}

// Writes one fitted record's values into the row at the given offset.
void fill_row(const EcmCoefficients& c, Eigen::MatrixXd& est, Eigen::MatrixXd& se,
              Eigen::Index row, Eigen::Index offset) {
  Eigen::Index j = offset;
  auto put = [&](double value, double error) {
    est(row, j) = value;
    se(row, j) = error;
    ++j;
  };
  put(c.alpha, c.alpha_se);
  put(c.rho_star.value, c.rho_star.std_error);
  for (const auto& x : c.long_run) {
    put(x.defined ? x.value : kNan, x.defined ? x.std_error : kNan);
  }
  for (const auto& x : c.short_run) put(x.value, x.std_error);
}

}  // namespace

RecoveryStudy run_recovery_study(const DgpSpec& dgp, int replications,
                                 Estimator estimator,
                                 const std::vector<double>& quantiles,
                                 Execution exec) {
  dgp.validate();
  if (replications < 2) {
    throw ConfigError("recovery study: need at least 2 replications");
  }
  if (estimator == Estimator::qardl && quantiles.empty()) {
    throw ConfigError("recovery study: qardl estimator needs quantiles");
  }
  const auto tracked = tracked_parameters(dgp, estimator, quantiles);
  const auto P = static_cast<Eigen::Index>(tracked.size());
  const auto R = static_cast<Eigen::Index>(replications);
  const std::size_t per_gamma = estimator == Estimator::qardl
                                    ? tracked.size() / quantiles.size()
                                    : tracked.size();

  RecoveryStudy study;
  study.replications = replications;
  study.unreliable_coverage = replications < 50;
  study.estimates = Eigen::MatrixXd::Constant(R, P, kNan);
  study.std_errors = Eigen::MatrixXd::Constant(R, P, kNan);
  study.rep_ok.assign(static_cast<std::size_t>(replications), 0);
  std::vector<std::string> errors(static_cast<std::size_t>(replications));

  const ModelSpec spec = dgp.truth_spec();
  parallel_for(static_cast<std::size_t>(replications), exec, [&](std::size_t r) {
    DgpSpec local = dgp;
    local.seed = derive_seed(dgp.seed, r);
    const auto row = static_cast<Eigen::Index>(r);
    try {
      const AlignedPanel panel = simulate_panel(local);
      if (estimator == Estimator::ardl) {
        const EcmFit ecm = to_ecm(fit_linear_ardl(panel, spec));
        fill_row(ecm.coefficients, study.estimates, study.std_errors, row, 0);
      } else {
        QardlOptions opts;
        opts.quantiles = quantiles;
        opts.seed = local.seed;
        opts.exec = Execution::serial;
        const QardlFitSet set = fit_qardl(panel, spec, opts);
        bool any_ok = false;
        for (std::size_t g = 0; g < set.records.size(); ++g) {
          if (!set.records[g].ok) continue;
          any_ok = true;
          fill_row(set.records[g].coefficients, study.estimates, study.std_errors,
                   row, static_cast<Eigen::Index>(g * per_gamma));
        }
        if (!any_ok) throw EstimationError("all quantile fits failed");
      }
      study.rep_ok[r] = 1;
    } catch (const std::exception& e) {
      errors[r] = e.what();
    }
  });

  for (std::size_t r = 0; r < errors.size(); ++r) {
    if (study.rep_ok[r]) continue;
    ++study.failures;
    if (study.failure_messages.size() < 5) {
      study.failure_messages.push_back("rep " + std::to_string(r) + ": " + errors[r]);
    }
  }
  if (5 * study.failures > replications) {
    std::string detail;
    for (const auto& m : study.failure_messages) detail += "\n  " + m;
    throw EstimationError("recovery study: failure rate above 20% (" +
                          std::to_string(study.failures) + "/" +
                          std::to_string(replications) + ")" + detail);
  }

  const double z95 = normal_quantile(0.975);
  for (Eigen::Index p = 0; p < P; ++p) {
    RecoveryParameter out;
    out.label = tracked[static_cast<std::size_t>(p)].label;
    out.truth = tracked[static_cast<std::size_t>(p)].truth;
    std::vector<double> vals;
    double se_sum = 0.0;
    std::size_t covered = 0, cover_n = 0;
    for (Eigen::Index r = 0; r < R; ++r) {
      const double v = study.estimates(r, p);
      if (!std::isfinite(v)) continue;
      vals.push_back(v);
      const double s = study.std_errors(r, p);
      se_sum += std::isfinite(s) ? s : 0.0;
      if (std::isfinite(out.truth) && std::isfinite(s)) {
        ++cover_n;
        if (std::fabs(v - out.truth) <= z95 * s) ++covered;
      }
    }
    out.n_used = vals.size();
    if (!vals.empty()) {
      const double nn = static_cast<double>(vals.size());
      double sum = 0.0;
      for (double v : vals) sum += v;
      out.mean = sum / nn;
      std::vector<double> sorted = vals;
      std::sort(sorted.begin(), sorted.end());
      out.median = sorted.size() % 2 == 1
                       ? sorted[sorted.size() / 2]
                       : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
      double ss = 0.0;
      for (double v : vals) ss += (v - out.mean) * (v - out.mean);
      out.sd = vals.size() > 1 ? std::sqrt(ss / (nn - 1.0)) : 0.0;
      out.mean_std_error = se_sum / nn;
      if (std::isfinite(out.truth)) {
        out.bias = out.mean - out.truth;
        double mse = 0.0;
        for (double v : vals) mse += (v - out.truth) * (v - out.truth);
        out.rmse = std::sqrt(mse / nn);
        out.coverage = cover_n > 0 ? static_cast<double>(covered) / static_cast<double>(cover_n)
                                   : kNan;
      } else {
        out.bias = kNan;
        out.rmse = kNan;
        out.coverage = kNan;
      }
    }
    study.parameters.push_back(std::move(out));
  }
  return study;
}

}  // namespace qardl
