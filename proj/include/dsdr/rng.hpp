#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace dsdr {

// Deterministic random source. Wraps mt19937_64 but derives all variates
// from raw engine output so sequences do not depend on libstdc++
// distribution internals. State round-trips through a string, which is how
// checkpoints capture the sampler position.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  // uniform in [0, 1) with 53-bit resolution
  double u01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // uniform integer in [0, n), rejection sampled (no modulo bias)
  int64_t uniform_int(int64_t n);

  // uniform in [lo, hi)
  double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

  // standard normal via Box-Muller (second variate discarded to keep the
  // serialized state self-contained)
  double normal();

  std::string serialize() const;
  static Rng deserialize(const std::string& text);

  bool operator==(const Rng& other) const { return engine_ == other.engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dsdr
