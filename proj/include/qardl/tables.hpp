#pragma once

#include <string>
#include <vector>

namespace qardl {

// Fixed-decimal rendering used by every text table; NaN prints as "".
std::string format_fixed(double x, int decimals = 4);

// A text table holds already-formatted cells. Rendering aligns columns,
// left-justifies the first (label) column and right-justifies the rest.
struct TextTable {
  std::string title;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> notes;  // printed beneath the rule
};

std::string render_text_table(const TextTable& table);

// CSV rendering of pre-formatted cells: header + rows, RFC-4180 quoting,
// CRLF record terminators. Numeric cells should be produced with
// format_full so the file round-trips losslessly; missing values are
// empty cells.
std::string render_csv_table(const std::vector<std::string>& columns,
                             const std::vector<std::vector<std::string>>& rows);

}  // namespace qardl
