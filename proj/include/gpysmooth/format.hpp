#pragma once

#include <cstdio>
#include <string>

namespace gpysmooth {

// Reals are always written with 15 significant digits so that output is
// byte-stable across platforms with IEEE doubles.
inline std::string fmt_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

}  // namespace gpysmooth
