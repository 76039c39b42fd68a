#pragma once

namespace hdim {

inline constexpr const char* kToolVersion = "1.0.0";

} // namespace hdim
