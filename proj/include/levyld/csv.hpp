#pragma once

#include <cstdio>
#include <string>

namespace levyld {

// 17 significant digits by default, '.' separator regardless of locale.
inline std::string format_double(double v, int digits = 17) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  std::string s(buf);
  for (char& ch : s) {
    if (ch == ',') ch = '.';
  }
  return s;
}

}  // namespace levyld
