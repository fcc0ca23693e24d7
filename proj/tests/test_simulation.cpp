#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

#include "qardl/ardl.hpp"
#include "qardl/errors.hpp"
#include "qardl/qardl.hpp"
#include "qardl/simulation.hpp"
#include "qardl/stats.hpp"
#include "qardl/unit_root.hpp"

using namespace qardl;

namespace {

const RecoveryParameter* find_parameter(const RecoveryStudy& study,
                                        const std::string& label) {
  for (const auto& p : study.parameters) {
    if (p.label == label) return &p;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("simulated panels are deterministic in the seed") {
  DgpSpec dgp;
  dgp.beta = {1.0, -0.5};
  dgp.reg_short_run = {{0.4}, {0.2}};
  dgp.n = 400;
  dgp.seed = 9;
  auto a = simulate_panel(dgp);
  auto b = simulate_panel(dgp);
  REQUIRE(a.size() == 400);
  REQUIRE(a.columns.size() == 3);
  CHECK(a.columns[0].name == "Y");
  CHECK(a.columns[0].role == VariableRole::dependent);
  CHECK(a.columns[1].name == "X1");
  CHECK(a.columns[1].role == VariableRole::epu);
  CHECK(a.columns[2].name == "X2");
  CHECK(a.columns[2].role == VariableRole::sp500);
  for (std::size_t c = 0; c < a.columns.size(); ++c) {
    CHECK(a.columns[c].values == b.columns[c].values);
  }
  CHECK(a.dates == b.dates);
  for (std::size_t t = 0; t + 1 < a.size(); ++t) {
    CHECK(days_from_civil(a.dates[t + 1]) == days_from_civil(a.dates[t]) + 1);
  }

  dgp.seed = 10;
  auto c = simulate_panel(dgp);
  bool differs = false;
  for (std::size_t t = 0; t < a.size(); ++t) {
    differs = differs || (a.columns[0].values[t] != c.columns[0].values[t]);
  }
  CHECK(differs);
}

TEST_CASE("degenerate DGP specifications are rejected") {
  DgpSpec dgp;
  dgp.rho = 0.1;
  CHECK_THROWS_AS(simulate_panel(dgp), ConfigError);
  dgp.rho = -1.5;
  CHECK_THROWS_AS(simulate_panel(dgp), ConfigError);
  dgp = DgpSpec{};
  dgp.n = 50;
  CHECK_THROWS_AS(simulate_panel(dgp), ConfigError);
  dgp = DgpSpec{};
  dgp.dep_short_run = {0.7, 0.4};  // explosive difference recursion
  CHECK_THROWS_AS(simulate_panel(dgp), ConfigError);
  dgp = DgpSpec{};
  dgp.error = ErrorKind::student_t;
  dgp.t_df = 2;
  CHECK_THROWS_AS(simulate_panel(dgp), ConfigError);
  dgp = DgpSpec{};
  dgp.error = ErrorKind::location_scale;
  dgp.scale_regressor = 9;
  CHECK_THROWS_AS(simulate_panel(dgp), ConfigError);
  dgp = DgpSpec{};
  dgp.beta = {};
  CHECK_THROWS_AS(simulate_panel(dgp), ConfigError);
}

TEST_CASE("a noiseless process is recovered to near machine precision") {
  DgpSpec dgp;
  dgp.rho = -0.3;
  dgp.alpha = 0.15;
  dgp.beta = {0.8, -0.4};
  dgp.dep_short_run = {0.25};
  dgp.reg_short_run = {{0.5, 0.2}, {0.7}};
  dgp.sigma = 0.0;  // no innovation noise; regressors still move
  dgp.n = 600;
  dgp.seed = 12;
  auto panel = simulate_panel(dgp);
  auto ecm = to_ecm(fit_linear_ardl(panel, dgp.truth_spec()));
  const auto& c = ecm.coefficients;
  CHECK(std::fabs(c.rho_star.value - dgp.rho) < 1e-6);
  CHECK(std::fabs(c.alpha - dgp.alpha) < 1e-6);
  REQUIRE(c.long_run.size() == 2);
  CHECK(std::fabs(c.long_run[0].value - 0.8) < 1e-6);
  CHECK(std::fabs(c.long_run[1].value + 0.4) < 1e-6);
  REQUIRE(c.short_run.size() == 4);  // phi_1, omega_0, omega_1, lambda_0
  CHECK(std::fabs(c.short_run[0].value - 0.25) < 1e-6);
  CHECK(std::fabs(c.short_run[1].value - 0.5) < 1e-6);
  CHECK(std::fabs(c.short_run[2].value - 0.2) < 1e-6);
  CHECK(std::fabs(c.short_run[3].value - 0.7) < 1e-6);

  // The exact linear relationship is also the solution at any quantile.
  QardlOptions opts;
  opts.quantiles = {0.3};
  auto q = fit_qardl(panel, dgp.truth_spec(), opts);
  REQUIRE(q.records[0].ok);
  CHECK(std::fabs(q.records[0].coefficients.rho_star.value - dgp.rho) < 1e-6);
  CHECK(q.records[0].objective < 1e-6);
}

TEST_CASE("simulated series cointegrate: the equilibrium residual is stationary") {
  int rejections = 0;
  const int reps = 100;
  for (int r = 0; r < reps; ++r) {
    DgpSpec dgp;
    dgp.rho = -0.3;
    dgp.beta = {1.0};
    dgp.n = 2000;
    dgp.seed = derive_seed(7000, r);
    auto panel = simulate_panel(dgp);
    const auto& y = panel.columns[0].values;
    const auto& x1 = panel.columns[1].values;
    ObservationSeries resid;
    resid.name = "eq";
    resid.dates = panel.dates;
    resid.values.resize(y.size());
    for (std::size_t t = 0; t < y.size(); ++t) {
      resid.values[t] = y[t] - 1.0 * x1[t];
    }
    auto res = adf_test(resid, Deterministic::constant);
    if (res.reject_at && *res.reject_at <= 0.01) ++rejections;
  }
  CHECK(rejections >= 95);
}

TEST_CASE("recovery studies guard replication counts and flag noisy coverage") {
  DgpSpec dgp;
  dgp.beta = {1.0};
  dgp.n = 300;
  CHECK_THROWS_AS(run_recovery_study(dgp, 1, Estimator::ardl), ConfigError);
  auto tiny = run_recovery_study(dgp, 10, Estimator::ardl, {0.5},
                                 Execution::serial);
  CHECK(tiny.unreliable_coverage);
  CHECK(tiny.replications == 10);
}

TEST_CASE("the recovery study tracks every parameter with correct truths") {
  DgpSpec dgp;
  dgp.rho = -0.25;
  dgp.alpha = 0.0;
  dgp.beta = {1.0, 0.5};
  dgp.dep_short_run = {0.2};
  dgp.reg_short_run = {{0.4}, {0.3}};
  dgp.n = 800;
  dgp.seed = 21;
  auto study = run_recovery_study(dgp, 50, Estimator::ardl, {0.5},
                                  Execution::serial);
  CHECK(!study.unreliable_coverage);
  CHECK(study.failures == 0);
  CHECK(study.rep_ok == std::vector<std::uint8_t>(50, 1));
  // alpha, rho*, two betas, phi_1, omega_0, lambda_0.
  CHECK(study.parameters.size() == 7);
  CHECK(study.estimates.rows() == 50);
  CHECK(study.estimates.cols() == 7);

  const auto* rho = find_parameter(study, "rho*");
  REQUIRE(rho != nullptr);
  CHECK(rho->truth == -0.25);
  CHECK(rho->n_used == 50);
  CHECK(std::fabs(rho->bias - (rho->mean - rho->truth)) < 1e-12);
  CHECK(rho->rmse >= std::fabs(rho->bias));
  CHECK(rho->sd >= 0.0);

  const auto* beta1 = find_parameter(study, "beta_X1");
  REQUIRE(beta1 != nullptr);
  CHECK(beta1->truth == 1.0);
  CHECK(std::fabs(beta1->median - 1.0) < 0.15);
  CHECK(beta1->coverage >= 0.85);

  const auto* omega = find_parameter(study, "omega_0");
  REQUIRE(omega != nullptr);
  CHECK(omega->truth == 0.4);
}

TEST_CASE("recovery studies are bitwise identical across execution policies") {
  DgpSpec dgp;
  dgp.beta = {1.0};
  dgp.reg_short_run = {{0.4}};
  dgp.n = 400;
  dgp.seed = 23;
  auto s = run_recovery_study(dgp, 20, Estimator::ardl, {0.5}, Execution::serial);
  auto p = run_recovery_study(dgp, 20, Estimator::ardl, {0.5}, Execution::parallel);
  REQUIRE(s.estimates.rows() == p.estimates.rows());
  bool identical = true;
  for (Eigen::Index i = 0; i < s.estimates.rows(); ++i) {
    for (Eigen::Index j = 0; j < s.estimates.cols(); ++j) {
      identical = identical && (s.estimates(i, j) == p.estimates(i, j)) &&
                  (s.std_errors(i, j) == p.std_errors(i, j));
    }
  }
  CHECK(identical);
}

TEST_CASE("the qardl estimator suffixes labels with the quantile") {
  DgpSpec dgp;
  dgp.beta = {1.0};
  dgp.reg_short_run = {{0.4}};
  dgp.n = 500;
  dgp.seed = 25;
  auto study = run_recovery_study(dgp, 6, Estimator::qardl, {0.25, 0.75},
                                  Execution::serial);
  CHECK(find_parameter(study, "rho*@0.25") != nullptr);
  CHECK(find_parameter(study, "rho*@0.75") != nullptr);
  CHECK(find_parameter(study, "beta_X1@0.25") != nullptr);
  CHECK(study.parameters.size() == 10);  // 5 tracked parameters x 2 quantiles
}

TEST_CASE("an impossible estimation task aborts with collected diagnostics") {
  DgpSpec dgp;
  dgp.beta = {1.0};
  // 90 dependent difference lags force a design with more columns than rows.
  dgp.dep_short_run.assign(90, 0.005);
  dgp.n = 100;
  dgp.seed = 27;
  try {
    run_recovery_study(dgp, 10, Estimator::ardl, {0.5}, Execution::serial);
    FAIL("expected EstimationError");
  } catch (const EstimationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("fail") != std::string::npos);
  }
}

TEST_CASE("location-scale errors make the affected slope rise in gamma") {
  DgpSpec dgp;
  dgp.rho = -0.3;
  dgp.beta = {1.0};
  dgp.reg_short_run = {{0.5}};
  dgp.error = ErrorKind::location_scale;
  dgp.scale_regressor = 0;
  dgp.scale_slope = 0.3;
  dgp.n = 1200;
  dgp.seed = 29;
  auto study = run_recovery_study(dgp, 40, Estimator::qardl, {0.2, 0.5, 0.8},
                                  Execution::parallel);
  const auto* lo = find_parameter(study, "omega_0@0.2");
  const auto* mid = find_parameter(study, "omega_0@0.5");
  const auto* hi = find_parameter(study, "omega_0@0.8");
  REQUIRE(lo != nullptr);
  REQUIRE(mid != nullptr);
  REQUIRE(hi != nullptr);
  CHECK(lo->mean < mid->mean);
  CHECK(mid->mean < hi->mean);
  // The spread should reflect sigma * slope * (z_0.8 - z_0.2) ~ 0.5.
  CHECK(hi->mean - lo->mean > 0.2);
}

TEST_CASE("estimates tighten as the sample grows") {
  auto study_at = [](int n) {
    DgpSpec dgp;
    dgp.rho = -0.3;
    dgp.beta = {1.0};
    dgp.reg_short_run = {{0.4}};
    dgp.n = n;
    dgp.seed = 31;
    return run_recovery_study(dgp, 60, Estimator::ardl, {0.5},
                              Execution::parallel);
  };
  auto small = study_at(500);
  auto large = study_at(2000);
  REQUIRE(small.parameters.size() == large.parameters.size());
  for (std::size_t i = 0; i < small.parameters.size(); ++i) {
    CHECK(large.parameters[i].rmse < small.parameters[i].rmse);
  }
}
