#pragma once

#include <charconv>
#include <cstdint>
#include <string>

#include "ddcur/errors.hpp"

namespace ddcur {

/// Shortest round-trip decimal form; locale-free and deterministic.
inline std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  if (res.ec != std::errc()) throw NumericError("format_double failed");
  return std::string(buf, res.ptr);
}

inline std::string format_int(std::int64_t value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

}  // namespace ddcur
