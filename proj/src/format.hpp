#pragma once

#include <charconv>
#include <ostream>

namespace subsector::detail {

/// Streams a double in its shortest round-trip form.
struct Shortest {
  double value;
};

inline std::ostream& operator<<(std::ostream& out, Shortest s) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, s.value);
  return out.write(buf, res.ptr - buf);
}

}  // namespace subsector::detail
