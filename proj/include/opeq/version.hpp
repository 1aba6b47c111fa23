#pragma once

namespace opeq {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace opeq
