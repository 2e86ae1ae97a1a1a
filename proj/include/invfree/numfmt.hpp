#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace invfree {

// Fixed significant-digit formatting used by every emitted report, so runs
// are byte-reproducible.  17 digits round-trip a double exactly.
inline std::string format_sig(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

inline std::string format_full(double v) { return format_sig(v, 17); }

// JSON has no literals for non-finite values; quote them instead.
inline std::string format_json_number(double v) {
  if (std::isnan(v)) return "\"nan\"";
  if (std::isinf(v)) return v > 0.0 ? "\"inf\"" : "\"-inf\"";
  return format_full(v);
}

}  // namespace invfree
