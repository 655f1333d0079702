#pragma once

#include <cstdint>
#include <random>

namespace dosprop {

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seeded generator with platform-independent output. mt19937_64 is fully
// specified by the standard; the distributions below are built by hand
// because std::*_distribution output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

  std::uint64_t seed() const noexcept { return seed_; }

  // Independent stream for (master seed, replicate, substream). Streams do not
  // depend on the order in which they are created.
  static Rng for_stream(std::uint64_t master_seed, std::uint64_t replicate, std::uint64_t substream = 0) {
    std::uint64_t s = splitmix64(master_seed);
    s = splitmix64(s ^ (replicate + 0x632be59bd9b4e019ULL));
    s = splitmix64(s ^ (substream * 0xd1b54a32d192ed03ULL + 1));
    return Rng(s);
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0,1), 53-bit resolution.
  double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  // Uniform integer in [0, bound). Multiply-shift; bias is below 2^-64 * bound.
  std::uint64_t below(std::uint64_t bound) {
    const unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Standard normal by inversion of a uniform draw.
  double normal();

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace dosprop
