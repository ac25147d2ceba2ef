// splitmix64: a small, fast, well-distributed 64-bit generator with a fixed
// published algorithm, so seeded runs reproduce bit-for-bit on any platform.
// std::mt19937 would also be portable, but the distribution adapters in
// <random> are not, which is why the uniform mapping is spelled out here.
#pragma once

#include <cstdint>

namespace fracpf {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1) with 53 random bits
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // uniform in (-1, 1)
  double uniform_pm1() { return 2.0 * uniform01() - 1.0; }

 private:
  std::uint64_t state_;
};

inline constexpr const char* rng_algorithm_name = "splitmix64";

}  // namespace fracpf
