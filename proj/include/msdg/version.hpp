#pragma once

namespace msdg {

inline constexpr const char* kToolName = "msdg";
inline constexpr const char* kVersion = "1.0.0";

}  // namespace msdg
