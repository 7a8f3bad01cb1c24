#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace madp::csv {

// RFC-4180-ish: comma separated, fields may be double-quoted with "" escapes,
// no embedded newlines. Blank lines are skipped; CRLF accepted.
std::vector<std::string> split_line(std::string_view line);

std::string quote(std::string_view field);

class Reader {
 public:
  explicit Reader(std::istream& in);

  // Throws Data on an empty stream.
  const std::vector<std::string>& header();
  bool next(std::vector<std::string>& row);
  std::size_t line() const noexcept { return line_; }

 private:
  bool read_line(std::string& out);

  std::istream& in_;
  std::vector<std::string> header_;
  bool have_header_ = false;
  std::size_t line_ = 0;
};

int parse_int(std::string_view text, std::size_t line);
double parse_double(std::string_view text, std::size_t line);

}  // namespace madp::csv
