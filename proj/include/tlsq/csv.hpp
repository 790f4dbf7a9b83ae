#pragma once

// Minimal reader for the `#`-commented numeric CSV files used by field maps
// and datasets: `# key=value` header lines followed by numeric rows.

#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "tlsq/error.hpp"

namespace tlsq::csv {

struct Document {
  // Recognised `# key=value` lines in file order.
  std::vector<std::pair<std::string, std::string>> header;
  std::vector<std::size_t> header_lines;
  // Comment lines that are not key=value pairs, verbatim without the leading '#'.
  std::vector<std::string> comments;
  // Every '#' line in file order, verbatim without the '#', with its header
  // key (empty for plain comments).
  std::vector<std::string> preamble;
  std::vector<std::string> preamble_keys;
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> row_lines;  // 1-based source line of each row

  const std::string* find(std::string_view key) const {
    for (const auto& [k, v] : header)
      if (k == key) return &v;
    return nullptr;
  }
};

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline double parse_double(std::string_view text, std::size_t row, std::size_t column) {
  text = trim(text);
  double value = 0.0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  if (!text.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (text.empty() || ec != std::errc{} || ptr != end)
    throw ParseError("cannot parse number '" + std::string(text) + "'", row, column);
  return value;
}

// Header value lookup with a parse error pointing at the header block.
inline double header_double(const Document& doc, std::string_view key) {
  const std::string* value = doc.find(key);
  if (!value) throw ParseError("missing header '# " + std::string(key) + "='", 0, 0);
  std::size_t line = 0;
  for (std::size_t i = 0; i < doc.header.size(); ++i)
    if (doc.header[i].first == key) line = doc.header_lines[i];
  return parse_double(*value, line, 0);
}

// A non-comment line whose first cell is not numeric is treated as a column
// title and skipped, provided it appears before any data row.
inline Document parse(std::istream& in, std::size_t expected_columns) {
  Document doc;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty()) continue;
    if (view.front() == '#') {
      std::string_view body = trim(view.substr(1));
      const auto eq = body.find('=');
      const bool is_pair = eq != std::string_view::npos && eq > 0 &&
                           body.substr(0, eq).find(' ') == std::string_view::npos;
      std::string verbatim = line.substr(line.find('#') + 1);
      if (is_pair) {
        doc.header.emplace_back(std::string(body.substr(0, eq)), std::string(body.substr(eq + 1)));
        doc.header_lines.push_back(line_no);
        doc.preamble_keys.emplace_back(body.substr(0, eq));
      } else {
        doc.comments.push_back(verbatim);
        doc.preamble_keys.emplace_back();
      }
      doc.preamble.push_back(std::move(verbatim));
      continue;
    }
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
      const auto comma = view.find(',', start);
      cells.push_back(view.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                         : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (doc.rows.empty()) {
      const auto first = trim(cells.front());
      const bool looks_numeric =
          !first.empty() && (std::isdigit(static_cast<unsigned char>(first.front())) ||
                             first.front() == '-' || first.front() == '+' || first.front() == '.');
      if (!looks_numeric) continue;
    }
    if (cells.size() != expected_columns)
      throw ParseError("expected " + std::to_string(expected_columns) + " columns, found " +
                           std::to_string(cells.size()),
                       line_no, 0);
    std::vector<double> row;
    row.reserve(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) row.push_back(parse_double(cells[c], line_no, c + 1));
    doc.rows.push_back(std::move(row));
    doc.row_lines.push_back(line_no);
  }
  return doc;
}

inline Document parse_file(const std::string& path, std::size_t expected_columns) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'", 0, 0);
  return parse(in, expected_columns);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'", 0, 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace tlsq::csv
