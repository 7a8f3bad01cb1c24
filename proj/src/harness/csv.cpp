#include "harness/csv.hpp"

#include <charconv>
#include <cmath>

#include "core/errors.hpp"

namespace madp::csv {

std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::string quote(std::string_view field) {
  if (field.find_first_of(",\"") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

Reader::Reader(std::istream& in) : in_(in) {}

bool Reader::read_line(std::string& out) {
  while (std::getline(in_, out)) {
    ++line_;
    if (!out.empty() && out.back() == '\r') out.pop_back();
    if (out.find_first_not_of(" \t") != std::string::npos) return true;
  }
  return false;
}

const std::vector<std::string>& Reader::header() {
  if (!have_header_) {
    std::string line;
    if (!read_line(line)) fail(ErrorCode::Data, "CSV input is empty");
    header_ = split_line(line);
    for (std::string& h : header_) {
      const auto b = h.find_first_not_of(" \t");
      const auto e = h.find_last_not_of(" \t");
      h = b == std::string::npos ? std::string() : h.substr(b, e - b + 1);
    }
    have_header_ = true;
  }
  return header_;
}

bool Reader::next(std::vector<std::string>& row) {
  header();
  std::string line;
  if (!read_line(line)) return false;
  row = split_line(line);
  return true;
}

int parse_int(std::string_view text, std::size_t line) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    fail(ErrorCode::Data, "line " + std::to_string(line) + ": '" + std::string(text) +
                              "' is not an integer");
  }
  return v;
}

double parse_double(std::string_view text, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    fail(ErrorCode::Data, "line " + std::to_string(line) + ": '" + std::string(text) +
                              "' is not a finite number");
  }
  return v;
}

}  // namespace madp::csv
