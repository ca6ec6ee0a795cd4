#pragma once

namespace cdcp {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cdcp
