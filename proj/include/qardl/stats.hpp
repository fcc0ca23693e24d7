#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qardl {

// Standard normal density.
double normal_pdf(double x);

// Standard normal CDF, accurate over the full double range.
double normal_cdf(double x);

// Inverse standard normal CDF. Rational approximation refined by one
// Halley step against normal_cdf; relative error below 1e-14 on (0,1).
double normal_quantile(double p);

// Survival function of a chi-squared variate with 2 degrees of freedom.
double chi2_survival_2df(double x);

// Lower empirical quantile: smallest order statistic x_(m) such that the
// check-function sum is minimized (m = ceil(n*gamma), lower value on ties).
double empirical_quantile_lower(std::vector<double> values, double gamma);

// Significance stars per the 1%/5%/10% convention: "***", "**", "*" or "".
std::string significance_stars(double p_value);

// Two-sided p-value of a t-ratio against the standard normal.
double normal_two_sided_p(double t_ratio);

// SplitMix64 step; used to derive independent per-replication seeds from a
// master seed so results do not depend on scheduling order.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

// Deterministic random source. Uniform/normal draws are produced by inverse
// transform from the raw 64-bit stream, so sequences are identical across
// platforms and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  double uniform();                  // [0, 1)
  double normal();                   // N(0, 1)
  double student_t(int df);          // integer df >= 3
  // Normal draw truncated to |z| <= bound (rejection sampling).
  double truncated_normal(double bound);

 private:
  std::uint64_t state_[4];
};

}  // namespace qardl
