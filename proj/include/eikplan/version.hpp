#pragma once

namespace eikplan {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace eikplan
