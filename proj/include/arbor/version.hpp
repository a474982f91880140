#pragma once

namespace arbor {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace arbor
