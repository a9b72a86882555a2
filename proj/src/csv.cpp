#include "jrc/csv.hpp"

#include <array>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "jrc/errors.hpp"

namespace jrc::csv {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // fold -0
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw NumericalError("cannot format double");
  return std::string(buf.data(), ptr);
}

namespace {

std::string render(const Cell& c) {
  struct Visitor {
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(double d) const { return format_double(d); }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(std::uint64_t u) const { return std::to_string(u); }
  };
  return std::visit(Visitor{}, c);
}

}  // namespace

Writer::Writer(std::ostream& out, std::vector<std::string> header) : out_(out), header_(std::move(header)) {
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (i) out_ << ',';
    out_ << header_[i];
  }
  out_ << '\n';
}

void Writer::row(std::initializer_list<Cell> cells) { row(std::vector<Cell>(cells)); }

void Writer::row(const std::vector<Cell>& cells) {
  if (cells.size() != header_.size()) {
    throw ContractViolation("csv row has " + std::to_string(cells.size()) + " cells, header has " +
                            std::to_string(header_.size()));
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << render(cells[i]);
  }
  out_ << '\n';
}

std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> out;
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      break;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view field) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw DomainError("not a number: '" + std::string(field) + "'");
  }
  return v;
}

}  // namespace jrc::csv
