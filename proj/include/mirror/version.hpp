#pragma once

namespace mirror {

inline constexpr int version_major = 0;
inline constexpr int version_minor = 1;
inline constexpr int version_patch = 0;

/// Version string stamped into report headers and the model file format.
inline constexpr const char* version_string = "0.1.0";

}  // namespace mirror
