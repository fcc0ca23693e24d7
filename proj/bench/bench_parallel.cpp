// Timing comparison of the serial reference path against the OpenMP path on
// the three parallel kernels: the quantile grid, the pairs bootstrap, and the
// Monte-Carlo recovery study. Both paths produce bitwise identical results;
// this target only reports wall-clock times.

#include <chrono>
#include <cstdio>

#include "qardl/qardl.hpp"
#include "qardl/quantile.hpp"
#include "qardl/simulation.hpp"

namespace {

using Clock = std::chrono::steady_clock;

template <typename F>
double seconds(F&& work) {
  const auto t0 = Clock::now();
  work();
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(const char* label, double serial, double parallel) {
  std::printf("%-44s serial %7.3fs   parallel %7.3fs   speedup %5.2fx\n", label,
              serial, parallel, parallel > 0.0 ? serial / parallel : 0.0);
}

}  // namespace

int main() {
  using namespace qardl;

  DgpSpec dgp;
  dgp.n = 1500;
  dgp.beta = {0.6, 1.0};
  dgp.reg_short_run = {{0.2}, {0.1}};
  dgp.dep_short_run = {0.15};
  dgp.seed = 7;

  const AlignedPanel panel = simulate_panel(dgp);
  const ModelSpec spec = dgp.truth_spec();

  std::printf("identical work under both execution policies\n\n");

  {
    QardlOptions opt;
    opt.exec = Execution::serial;
    const double s = seconds([&] { fit_qardl(panel, spec, opt); });
    opt.exec = Execution::parallel;
    const double p = seconds([&] { fit_qardl(panel, spec, opt); });
    report("quantile grid, 9 levels, kernel SEs", s, p);
  }

  {
    QardlOptions opt;
    opt.quantiles = {0.5};
    opt.se = SeMethod::bootstrap;
    opt.bootstrap_replications = 300;
    opt.exec = Execution::serial;
    const double s = seconds([&] { fit_qardl(panel, spec, opt); });
    opt.exec = Execution::parallel;
    const double p = seconds([&] { fit_qardl(panel, spec, opt); });
    report("pairs bootstrap, 300 replications", s, p);
  }

  {
    DgpSpec small = dgp;
    small.n = 600;
    const double s = seconds(
        [&] { run_recovery_study(small, 60, Estimator::ardl, {0.5}, Execution::serial); });
    const double p = seconds(
        [&] { run_recovery_study(small, 60, Estimator::ardl, {0.5}, Execution::parallel); });
    report("recovery study, 60 replications", s, p);
  }

  return 0;
}
