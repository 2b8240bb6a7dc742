#pragma once

// Locale-independent number formatting for CSV output.

#include <charconv>
#include <cmath>
#include <string>
#include <string_view>

namespace meshmdp::csv {

// Shortest round-trip representation, '.' decimal separator.
inline std::string number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Fixed-precision representation for human-facing columns (timings).
inline std::string fixed(double v, int precision) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, precision);
  return std::string(buf, res.ptr);
}

// Quotes a field when it contains a separator, quote or newline.
inline std::string field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace meshmdp::csv
