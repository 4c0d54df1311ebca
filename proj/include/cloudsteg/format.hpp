#pragma once

#include <charconv>
#include <string>

namespace cloudsteg {

// Shortest round-trip decimal form; locale independent.
inline std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

}  // namespace cloudsteg
