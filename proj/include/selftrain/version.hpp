#pragma once

#include <string_view>

namespace selftrain {

inline constexpr std::string_view kToolName = "selftrain";
inline constexpr std::string_view kToolVersion = "0.1.0";

} // namespace selftrain
