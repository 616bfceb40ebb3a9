#pragma once

#include <cstdio>
#include <string>

#include "eikplan/types.hpp"

namespace eikplan::internal {

// Fixed 17-significant-digit decimal form: round-trips doubles exactly and
// keeps repeated file writes byte-identical.
inline std::string fmt_real(Real v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace eikplan::internal
