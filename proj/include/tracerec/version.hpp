#pragma once

#include <string_view>

namespace tracerec {

inline constexpr std::string_view kToolName = "tracerec";
inline constexpr std::string_view kVersion = "1.0.0";

}  // namespace tracerec
