#pragma once

// Reproducible random streams. Every stream is a std::mt19937_64 whose state
// is initialized through std::seed_seq from the 64-bit run seed and a 64-bit
// stream key; both algorithms are fully specified by the standard, so draws
// are identical across platforms and independent of thread scheduling.

#include <cstdint>
#include <random>

#include "grbell/geometry.hpp"

namespace grbell {

class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // Uniform on the unit sphere (Archimedes: z uniform in [-1, 1]).
  Vec3 unit_vector();

 private:
  std::mt19937_64 engine_;
};

// Stream key for (a, b) pairs such as (triple index, block index).
constexpr std::uint64_t stream_key(std::uint32_t a, std::uint32_t b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace grbell
