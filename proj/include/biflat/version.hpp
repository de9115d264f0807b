#pragma once

namespace biflat {

inline constexpr const char* kToolName = "biflat";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace biflat
