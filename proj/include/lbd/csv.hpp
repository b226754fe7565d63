#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace lbd::csv {

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);

double parse_double(std::string_view s);
long parse_long(std::string_view s);

/// Splits one CSV line on commas. No quoting: none of the formats need it.
std::vector<std::string_view> split_line(std::string_view line);

/// A parsed CSV file: header names plus rows of raw cells.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index for a header name; throws ValidationError when missing.
  std::size_t column(std::string_view name) const;
};

Table read_file(const std::string& path);

/// Row-oriented writer accumulating into an in-memory buffer.
class Writer {
 public:
  explicit Writer(std::vector<std::string> header);

  void append_raw(std::string_view cell);
  void append(double v) { append_raw(format_double(v)); }
  void append(long v) { append_raw(std::to_string(v)); }
  void append(int v) { append_raw(std::to_string(v)); }
  void end_row();

  const std::string& buffer() const { return buf_; }
  void write_file(const std::string& path) const;

 private:
  std::string buf_;
  std::size_t columns_ = 0;
  std::size_t in_row_ = 0;
};

}  // namespace lbd::csv
