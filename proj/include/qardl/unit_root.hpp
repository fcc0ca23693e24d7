#pragma once

#include <map>
#include <optional>

#include "qardl/series.hpp"

namespace qardl {

enum class Deterministic { constant, constant_trend };
enum class UnitRootTest { adf, pp };
enum class LagSelection { fixed, aic, bic };

struct UnitRootResult {
  UnitRootTest test = UnitRootTest::adf;
  double statistic = 0.0;   // ADF: t-ratio on the lagged level; PP: Z_rho
  double z_t = 0.0;         // PP only: the companion t-style statistic
  int lag_or_bandwidth = 0;
  Deterministic deterministic = Deterministic::constant;
  std::map<double, double> critical_values;  // level (0.01/0.05/0.10) -> cv
  std::optional<double> reject_at;  // strongest level with statistic < cv
  double p_value = 1.0;             // interpolated, approximate
};

// Augmented Dickey-Fuller t-test. max_lag < 0 selects the conventional
// automatic cap floor(12*(n/100)^(1/4)); under aic/bic the lag is chosen on
// a common truncated sample and the test refit at the winner. Critical
// values from the MacKinnon response surface. Throws EstimationError when
// the series is too short or the regression is singular.
UnitRootResult adf_test(const ObservationSeries& s, Deterministic det,
                        int max_lag = -1, LagSelection selection = LagSelection::bic);

// Phillips-Perron normalized-bias test Z_rho (companion Z_t also reported)
// with a Bartlett-kernel long-run variance. bandwidth < 0 selects
// floor(4*(T/100)^(2/9)). Critical values interpolated in 1/T from the
// classic Z_rho tabulation (approximate).
UnitRootResult pp_test(const ObservationSeries& s, Deterministic det,
                       int bandwidth = -1);

}  // namespace qardl
