#pragma once

namespace spherelab {

inline constexpr const char* kToolName = "spherelab";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace spherelab
