#pragma once

namespace lvrlab {

inline constexpr const char* tool_name = "lvrlab";
inline constexpr const char* tool_version = "0.1.0";

}  // namespace lvrlab
