#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

namespace hexinspect {

/// Shortest text that reads back to exactly `v`.
inline std::string format_double(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, r.ptr};
}

}  // namespace hexinspect
