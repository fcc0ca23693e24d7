#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace qardl {

// Calendar date (proleptic Gregorian). Plain aggregate; ordering is
// lexicographic on (year, month, day).
struct Date {
  int year = 1970;
  int month = 1;
  int day = 1;

  friend auto operator<=>(const Date&, const Date&) = default;
};

// Days since 1970-01-01 (Howard Hinnant's civil-days algorithm).
std::int64_t days_from_civil(const Date& d);

// Inverse of days_from_civil.
Date civil_from_days(std::int64_t z);

// Strict "YYYY-MM-DD" parse; rejects impossible dates (e.g. Feb 30).
std::optional<Date> parse_iso_date(std::string_view text);

// Formats as "YYYY-MM-DD".
std::string to_string(const Date& d);

}  // namespace qardl
