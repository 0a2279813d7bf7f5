#pragma once

#include <cstdint>
#include <random>

namespace qeraser {

// splitmix64 finalizer, used to derive independent substream seeds.
std::uint64_t mix64(std::uint64_t x);

// Hashes (master, stream, cell_a, cell_b) into a substream seed so that every
// unit, source and sweep cell owns a statistically independent stream.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                          std::uint64_t cell_a = 0, std::uint64_t cell_b = 0);

// Deterministic uniform generator. Doubles are built from raw engine words so
// streams do not depend on the standard library's distribution internals.
class Prng {
 public:
  explicit Prng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qeraser
