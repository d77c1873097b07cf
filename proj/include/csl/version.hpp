#pragma once

namespace csl {

inline constexpr const char* kVersion = "0.1.0";

} // namespace csl
