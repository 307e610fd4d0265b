#pragma once

// Minimal CSV helpers: RFC-style quoting, '#'-prefixed comment lines for
// manifests, stable numeric formatting.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace jobtab {

std::string csv_escape(const std::string& field);

// Shortest stable formatting: integers print without a decimal point,
// other values with up to 12 significant digits.
std::string format_number(double v);

void write_csv_row(std::ostream& os, const std::vector<std::string>& fields);

// Splits one CSV record (no embedded newlines in our files).
std::vector<std::string> split_csv_row(const std::string& line);

// Reads all rows of a CSV stream, skipping blank and '#' comment lines.
// The first non-comment row is the header.
struct CsvFile {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> row_numbers;  // 1-based line numbers for messages
  std::vector<std::string> comments;
};
CsvFile read_csv(std::istream& is);

double parse_double(const std::string& s, std::size_t row, const char* what);
long long parse_int(const std::string& s, std::size_t row, const char* what);

}  // namespace jobtab
