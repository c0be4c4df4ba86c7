#pragma once

#include <cstdio>
#include <string>

namespace photoauth {

/// Probabilities and other results: 17 significant digits, locale-free.
inline std::string fmt_prob(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Grid coordinates and other inputs echoed back: 12 significant digits.
inline std::string fmt_coord(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace photoauth
