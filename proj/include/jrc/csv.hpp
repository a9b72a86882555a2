#pragma once

#include <charconv>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace jrc::csv {

/// Shortest round-trip decimal form, '.' separator, locale independent.
std::string format_double(double v);

using Cell = std::variant<std::string, double, std::int64_t, std::uint64_t>;

/// Header-first CSV emitter. Every row must match the header width.
class Writer {
 public:
  Writer(std::ostream& out, std::vector<std::string> header);

  void row(std::initializer_list<Cell> cells);
  void row(const std::vector<Cell>& cells);

  std::size_t columns() const noexcept { return header_.size(); }

 private:
  std::ostream& out_;
  std::vector<std::string> header_;
};

/// Splits one CSV line on commas (no quoting; emitted files never need it).
std::vector<std::string> split_line(std::string_view line);

double parse_double(std::string_view field);

}  // namespace jrc::csv
