#pragma once

#include <charconv>
#include <string>

namespace evt {

// Shortest decimal string that round-trips to the same double; the one
// number format used in every machine-readable artifact so output is
// reproducible byte for byte.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace evt
