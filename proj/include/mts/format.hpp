#pragma once

#include <cstdio>
#include <string>

namespace mts {

/// Round-trip-safe double formatting, stable across runs for CSV byte-compares.
inline std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace mts
