#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <vector>

#include "macwt/errors.hpp"

namespace macwt {

/// Shortest round-trip decimal for a double. Locale-independent, so CSV and
/// JSON artifacts are byte-stable across runs.
inline std::string fmt_double(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

template <class Int>
  requires std::is_integral_v<Int>
std::string fmt_int(Int v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// Minimal CSV writer: fixed header, rows of pre-formatted fields, LF line ends.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
    append_row(header);
  }

  void row(const std::vector<std::string>& fields) {
    if (fields.size() != columns_) {
      throw ShapeError("csv row has " + std::to_string(fields.size()) + " fields, header has " +
                       std::to_string(columns_));
    }
    append_row(fields);
  }

  const std::string& str() const noexcept { return text_; }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot open '" + path + "' for writing");
    out << text_;
  }

 private:
  void append_row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) text_ += ',';
      text_ += fields[i];
    }
    text_ += '\n';
  }

  std::size_t columns_;
  std::string text_;
};

/// Floor of a real-valued bit count with slack for representation error,
/// e.g. 16 * (0.5 log2 3 - 0.5 log2 1.5) must give 8, not 7.
inline std::uint64_t floor_bits(double x) {
  if (!(x > 0.0)) return 0;
  return static_cast<std::uint64_t>(std::floor(x + 1e-9));
}

}  // namespace macwt
