#include "qeraser/rng.h"

namespace qeraser {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                          std::uint64_t cell_a, std::uint64_t cell_b) {
  std::uint64_t h = mix64(master);
  h = mix64(h ^ stream);
  h = mix64(h ^ cell_a);
  h = mix64(h ^ cell_b);
  return h;
}

}  // namespace qeraser
