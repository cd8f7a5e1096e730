#include "shiftlab/format.hpp"

#include <cstdio>

namespace shiftlab {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace shiftlab
