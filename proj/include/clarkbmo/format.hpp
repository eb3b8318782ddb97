#pragma once

#include <string>

namespace clarkbmo {

/// Decimal text of `x` with 17 significant digits ("%.17g"); round-trips exactly.
std::string format_double(double x);

}  // namespace clarkbmo
