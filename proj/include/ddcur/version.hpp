#pragma once

namespace ddcur {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ddcur
