#pragma once

#include <string>
#include <vector>

#include "qardl/date.hpp"

namespace qardl {

// A named daily series. Invariants (enforced by validate / the ingest path):
// dates strictly increasing, one value per date, all values finite.
struct ObservationSeries {
  std::string name;
  std::vector<Date> dates;
  std::vector<double> values;

  std::size_t size() const { return dates.size(); }

  // Throws DataError on any invariant violation.
  void validate() const;
};

// Elementwise natural log; throws DataError naming the first offending date
// if any value is <= 0. Callers must pre-shift series whose raw convention
// allows non-positive values.
ObservationSeries log_transform(const ObservationSeries& s);

// First differences: values[i] = s.values[i+1] - s.values[i], dated at the
// later observation. Throws DataError when fewer than two observations.
ObservationSeries first_difference(const ObservationSeries& s);

}  // namespace qardl
