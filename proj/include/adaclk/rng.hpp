#pragma once

#include <cstdint>
#include <random>

namespace adaclk {

// Thin wrapper around mt19937_64 that avoids std::*_distribution,
// whose output is implementation-defined. All draws below are fully
// specified by the standard, so seeded results are portable.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  std::uint32_t next_u32() { return static_cast<std::uint32_t>(eng_() >> 32); }

  // Uniform in [0, n). Modulo bias is irrelevant for our n << 2^64.
  std::uint64_t below(std::uint64_t n) { return eng_() % n; }

  // Uniform double in [0, 1).
  double real() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  bool coin() { return (eng_() & 1u) != 0; }

private:
  std::mt19937_64 eng_;
};

// splitmix64; used to derive independent per-unit seeds from a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

} // namespace adaclk
