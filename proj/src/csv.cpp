#include "jobtab/csv.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace jobtab {

std::string csv_escape(const std::string& field) {
  bool needs = field.find_first_of(",\"\n") != std::string::npos;
  if (!needs) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (v == static_cast<long long>(v) && std::fabs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
    return buf;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_csv_row(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os << ',';
    os << csv_escape(fields[i]);
  }
  os << '\n';
}

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

CsvFile read_csv(std::istream& is) {
  CsvFile file;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      file.comments.push_back(line);
      continue;
    }
    auto fields = split_csv_row(line);
    if (!have_header) {
      file.header = std::move(fields);
      have_header = true;
    } else {
      file.rows.push_back(std::move(fields));
      file.row_numbers.push_back(lineno);
    }
  }
  return file;
}

double parse_double(const std::string& s, std::size_t row, const char* what) {
  if (s.empty()) throw std::invalid_argument(std::string("row ") + std::to_string(row) +
                                             ": empty " + what);
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw std::invalid_argument(std::string("row ") + std::to_string(row) +
                                ": bad " + what + " '" + s + "'");
  return v;
}

long long parse_int(const std::string& s, std::size_t row, const char* what) {
  if (s.empty()) throw std::invalid_argument(std::string("row ") + std::to_string(row) +
                                             ": empty " + what);
  char* end = nullptr;
  long long v = std::strtoll(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0')
    throw std::invalid_argument(std::string("row ") + std::to_string(row) +
                                ": bad " + what + " '" + s + "'");
  return v;
}

}  // namespace jobtab
