#pragma once

#include <string>

namespace shiftlab {

/// Round-trippable decimal text ("%.17g"); "nan", "inf" and "-inf" for non-finite values.
std::string format_double(double x);

}  // namespace shiftlab
