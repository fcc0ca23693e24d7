#include "qardl/tables.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "qardl/csv.hpp"

namespace qardl {

std::string format_fixed(double x, int decimals) {
  if (std::isnan(x)) return "";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, x);
  return buf;
}

std::string render_text_table(const TextTable& table) {
  const std::size_t n_cols = table.columns.size();
  std::vector<std::size_t> widths(n_cols, 0);
  for (std::size_t c = 0; c < n_cols; ++c) widths[c] = table.columns[c].size();
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < n_cols && c < row.size(); ++c) {
      widths[c] = std::max(widths[c], row[c].size());
    }
  }
  std::size_t total = 0;
  for (std::size_t c = 0; c < n_cols; ++c) total += widths[c] + (c ? 2 : 0);

  std::ostringstream os;
  auto rule = [&] { os << std::string(total, '-') << '\n'; };
  auto emit = [&](const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t c = 0; c < n_cols; ++c) {
      if (c) line += "  ";
      const std::string& cell = c < cells.size() ? cells[c] : std::string();
      const std::size_t pad = widths[c] - std::min(widths[c], cell.size());
      if (c == 0) {
        line += cell + std::string(pad, ' ');
      } else {
        line += std::string(pad, ' ') + cell;
      }
    }
    // Lines end at the last visible glyph, not at alignment padding.
    const std::size_t end = line.find_last_not_of(' ');
    line.erase(end == std::string::npos ? 0 : end + 1);
    os << line << '\n';
  };

  if (!table.title.empty()) {
    os << table.title << '\n';
    rule();
  }
  emit(table.columns);
  rule();
  for (const auto& row : table.rows) emit(row);
  rule();
  for (const auto& note : table.notes) os << note << '\n';
  return os.str();
}

std::string render_csv_table(const std::vector<std::string>& columns,
                             const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream os;
  write_csv_row(os, columns);
  for (const auto& row : rows) write_csv_row(os, row);
  return os.str();
}

}  // namespace qardl
