#include "qardl/descriptive.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "qardl/errors.hpp"
#include "qardl/stats.hpp"

namespace qardl {

DescriptiveStats describe(const ObservationSeries& s) {
  const std::size_t n = s.size();
  if (n < 4) {
    throw DataError("describe: series '" + s.name + "' needs n >= 4 (got " +
                    std::to_string(n) + ")");
  }
  const double nn = static_cast<double>(n);

  // Accumulate moments over a sorted copy so that the result does not depend
  // on the observation order at all, even at the last bit.
  std::vector<double> sorted = s.values;
  std::sort(sorted.begin(), sorted.end());

  DescriptiveStats d;
  d.n = n;
  d.minimum = sorted.front();
  d.maximum = sorted.back();

  double sum = 0.0;
  for (double v : sorted) sum += v;
  d.mean = sum / nn;

  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : sorted) {
    const double c = v - d.mean;
    const double c2 = c * c;
    m2 += c2;
    m3 += c2 * c;
    m4 += c2 * c2;
  }
  d.std_dev = std::sqrt(m2 / (nn - 1.0));
  m2 /= nn;
  m3 /= nn;
  m4 /= nn;
  if (m2 <= 0.0) {
    throw DataError("describe: series '" + s.name +
                    "' has zero variance; skewness and kurtosis undefined");
  }
  d.skewness = m3 / std::pow(m2, 1.5);
  d.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  std::tie(d.jarque_bera, d.jb_p_value) = jarque_bera(d.skewness, d.excess_kurtosis, n);
  return d;
}

std::pair<double, double> jarque_bera(double skewness, double excess_kurtosis,
                                      std::size_t n) {
  if (n < 4) throw DataError("jarque_bera: n must be >= 4");
  const double stat = static_cast<double>(n) / 6.0 *
                      (skewness * skewness + excess_kurtosis * excess_kurtosis / 4.0);
  return {stat, chi2_survival_2df(stat)};
}

}  // namespace qardl
