#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "qardl/series.hpp"

namespace qardl {

// Reads a CSV file (header row, ISO date column, numeric value columns) into
// one ObservationSeries per requested value column. Empty or unparseable
// value cells drop that row from the affected series only. An empty
// value_columns list selects every non-date column in header order.
// Throws DataError on: unreadable file, missing columns, unparseable dates,
// or a duplicate date within a column.
std::vector<ObservationSeries> ingest_csv(const std::string& path,
                                          const std::string& date_column,
                                          const std::vector<std::string>& value_columns = {});

// Splits raw CSV text into rows of fields. Quoted fields may contain commas,
// doubled quotes, and newlines; both LF and CRLF line endings are accepted.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

// Quotes a field per RFC 4180 when it contains a comma, quote, or newline.
std::string csv_escape(const std::string& field);

// Shortest round-trippable decimal rendering (printf %.17g).
std::string format_full(double x);

// Writes one CSV record with CRLF terminator, escaping fields as needed.
void write_csv_row(std::ostream& os, const std::vector<std::string>& fields);

}  // namespace qardl
