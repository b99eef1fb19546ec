#pragma once

namespace triosc {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kToolName = "triosc";

}  // namespace triosc
