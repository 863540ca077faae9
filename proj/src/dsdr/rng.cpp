#include "dsdr/rng.hpp"

#include <cmath>
#include <sstream>

#include "dsdr/common.hpp"

namespace dsdr {

int64_t Rng::uniform_int(int64_t n) {
  if (n <= 0) throw ConfigError("Rng::uniform_int: n must be positive");
  const uint64_t un = static_cast<uint64_t>(n);
  const uint64_t limit = UINT64_MAX - UINT64_MAX % un;
  uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return static_cast<int64_t>(v % un);
}

double Rng::normal() {
  double u1 = u01();
  double u2 = u01();
  while (u1 <= 1e-300) u1 = u01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::string Rng::serialize() const {
  std::ostringstream os;
  os << engine_;
  return os.str();
}

Rng Rng::deserialize(const std::string& text) {
  Rng r(0);
  std::istringstream is(text);
  is >> r.engine_;
  if (is.fail()) throw IntegrityError("Rng::deserialize: malformed engine state");
  return r;
}

}  // namespace dsdr
