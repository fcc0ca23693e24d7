#include "qardl/series.hpp"

#include <cmath>

#include "qardl/errors.hpp"

namespace qardl {

void ObservationSeries::validate() const {
  if (dates.size() != values.size()) {
    throw DataError("series '" + name + "': dates and values differ in length");
  }
  for (std::size_t i = 1; i < dates.size(); ++i) {
    if (!(dates[i - 1] < dates[i])) {
      throw DataError("series '" + name + "': dates not strictly increasing at " +
                      to_string(dates[i]));
    }
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw DataError("series '" + name + "': non-finite value at " +
                      to_string(dates[i]));
    }
  }
}

ObservationSeries log_transform(const ObservationSeries& s) {
  ObservationSeries out;
  out.name = s.name;
  out.dates = s.dates;
  out.values.reserve(s.values.size());
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    if (!(s.values[i] > 0.0)) {
      throw DataError("series '" + s.name + "': non-positive value at " +
                      to_string(s.dates[i]) + " cannot be logged");
    }
    out.values.push_back(std::log(s.values[i]));
  }
  return out;
}

ObservationSeries first_difference(const ObservationSeries& s) {
  if (s.size() < 2) {
    throw DataError("series '" + s.name + "': need at least 2 observations to difference");
  }
  ObservationSeries out;
  out.name = s.name;
  out.dates.assign(s.dates.begin() + 1, s.dates.end());
  out.values.reserve(s.size() - 1);
  for (std::size_t i = 1; i < s.size(); ++i) {
    out.values.push_back(s.values[i] - s.values[i - 1]);
  }
  return out;
}

}  // namespace qardl
