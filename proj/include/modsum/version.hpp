#pragma once

namespace modsum {

inline constexpr const char* kToolName = "modsum";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace modsum
