#pragma once

namespace lbd {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace lbd
