#pragma once
// Shortest round-trip decimal formatting for doubles (std::to_chars). All
// file output funnels through this so reruns are byte-identical.
#include <charconv>
#include <string>
#include <system_error>

namespace svie::detail {

inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace svie::detail
