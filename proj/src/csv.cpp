#include "qardl/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qardl/errors.hpp"

namespace qardl {

namespace {

bool parse_double(const std::string& text, double& out) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::string strip_bom(std::string text) {
  if (text.size() >= 3 && text[0] == '\xef' && text[1] == '\xbb' && text[2] == '\xbf') {
    text.erase(0, 3);
  }
  return text;
}

}  // namespace

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    // Skip rows that are entirely empty (trailing newline artifacts).
    if (row.size() > 1 || !row[0].empty()) rows.push_back(std::move(row));
    row.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field_started && field.empty()) {
          in_quotes = true;
          field_started = true;
        } else {
          field.push_back(c);
        }
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        end_row();
        break;
      case '\n':
        end_row();
        break;
      default:
        field.push_back(c);
        field_started = true;
        break;
    }
  }
  if (in_quotes) throw DataError("csv: unterminated quoted field");
  if (field_started || !field.empty() || !row.empty()) end_row();
  return rows;
}

std::vector<ObservationSeries> ingest_csv(const std::string& path,
                                          const std::string& date_column,
                                          const std::vector<std::string>& value_columns) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("csv: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const auto rows = parse_csv(strip_bom(buf.str()));
  if (rows.empty()) throw DataError("csv: '" + path + "' is empty");

  const auto& header = rows.front();
  auto column_index = [&](const std::string& name) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw DataError("csv: column '" + name + "' not found in '" + path + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };

  const std::size_t date_idx = column_index(date_column);
  std::vector<std::string> wanted = value_columns;
  if (wanted.empty()) {
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (j != date_idx) wanted.push_back(header[j]);
    }
  }

  std::vector<std::size_t> value_idx;
  value_idx.reserve(wanted.size());
  for (const auto& name : wanted) value_idx.push_back(column_index(name));

  struct Cell {
    Date date;
    double value;
  };
  std::vector<std::vector<Cell>> cells(wanted.size());

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& fields = rows[r];
    if (date_idx >= fields.size()) {
      throw DataError("csv: row " + std::to_string(r + 1) + " has no date cell");
    }
    const auto date = parse_iso_date(fields[date_idx]);
    if (!date) {
      throw DataError("csv: unparseable date '" + fields[date_idx] + "' at row " +
                      std::to_string(r + 1));
    }
    for (std::size_t j = 0; j < value_idx.size(); ++j) {
      if (value_idx[j] >= fields.size()) continue;
      const std::string& cell = fields[value_idx[j]];
      if (cell.empty()) continue;
      double v;
      if (!parse_double(cell, v)) continue;
      cells[j].push_back({*date, v});
    }
  }

  std::vector<ObservationSeries> out;
  out.reserve(wanted.size());
  for (std::size_t j = 0; j < wanted.size(); ++j) {
    auto& col = cells[j];
    std::stable_sort(col.begin(), col.end(),
                     [](const Cell& a, const Cell& b) { return a.date < b.date; });
    for (std::size_t i = 1; i < col.size(); ++i) {
      if (col[i].date == col[i - 1].date) {
        throw DataError("csv: duplicate date " + to_string(col[i].date) +
                        " in column '" + wanted[j] + "'");
      }
    }
    ObservationSeries s;
    s.name = wanted[j];
    s.dates.reserve(col.size());
    s.values.reserve(col.size());
    for (const auto& c : col) {
      s.dates.push_back(c.date);
      s.values.push_back(c.value);
    }
    s.validate();
    out.push_back(std::move(s));
  }
  return out;
}

std::string csv_escape(const std::string& field) {
  const bool needs_quotes =
      field.find_first_of(",\"\r\n") != std::string::npos;
  if (!needs_quotes) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += '"';
  return out;
}

std::string format_full(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_csv_row(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os << ',';
    os << csv_escape(fields[i]);
  }
  os << "\r\n";
}

}  // namespace qardl
