#pragma once

#include <cstddef>
#include <utility>

#include "qardl/series.hpp"

namespace qardl {

struct DescriptiveStats {
  std::size_t n = 0;
  double minimum = 0.0;
  double maximum = 0.0;
  double mean = 0.0;
  double std_dev = 0.0;          // sample standard deviation (n-1)
  double skewness = 0.0;         // m3 / m2^(3/2), 1/n central moments
  double excess_kurtosis = 0.0;  // m4 / m2^2 - 3
  double jarque_bera = 0.0;
  double jb_p_value = 1.0;
};

// Sample moments and the Jarque-Bera normality statistic. Throws DataError
// when n < 4 or the series has zero variance (higher moments undefined).
DescriptiveStats describe(const ObservationSeries& s);

// JB = n/6 * (S^2 + K^2/4) with K the EXCESS kurtosis; p-value from the
// chi-square(2) survival function. Returns (statistic, p_value).
std::pair<double, double> jarque_bera(double skewness, double excess_kurtosis,
                                      std::size_t n);

}  // namespace qardl
