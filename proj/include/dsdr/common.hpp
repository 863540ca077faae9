#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dsdr {

// Error families map onto CLI exit codes: config/schema -> 2,
// numerical -> 3, io -> 4. Shape and integrity errors are programming /
// artifact-corruption faults surfaced with the same mechanism.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct SchemaError : Error {
  using Error::Error;
};

struct ShapeError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

struct NumericalError : Error {
  using Error::Error;
};

struct IntegrityError : Error {
  using Error::Error;
};

// FNV-1a, used for config digests, dataset manifests and checkpoint
// integrity. Stable across platforms; not cryptographic.
inline uint64_t fnv1a64(const void* data, size_t n, uint64_t h = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline uint64_t fnv1a64(const std::string& s, uint64_t h = 0xcbf29ce484222325ull) {
  return fnv1a64(s.data(), s.size(), h);
}

std::string to_hex(uint64_t v);

// splitmix64 step; used to derive independent sub-seeds from one root seed.
inline uint64_t splitmix64(uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Deterministic seed for a sub-task identified by a chain of indices.
inline uint64_t derive_seed(uint64_t root, std::initializer_list<uint64_t> path) {
  uint64_t s = root;
  uint64_t v = splitmix64(s);
  for (uint64_t idx : path) {
    s ^= idx + 0x9e3779b97f4a7c15ull + (s << 6) + (s >> 2);
    v = splitmix64(s);
  }
  return v;
}

std::string format_double(double v, int digits = 4);

}  // namespace dsdr
