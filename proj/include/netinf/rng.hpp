#pragma once

#include <cstdint>
#include <limits>

namespace netinf {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Hashes a seed and a tuple of counters into a substream key.
inline constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                                          std::uint64_t c = 0) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ (b + 0x632be59bd9b4e019ULL));
  return splitmix64(h ^ (c + 0x8cb92ba72f3d8dd7ULL));
}

/// xoshiro256** seeded from a single key. Cheap to construct, so every
/// (seed, tag, i, j) tuple gets its own reproducible stream.
class StreamEngine {
 public:
  using result_type = std::uint64_t;

  explicit StreamEngine(std::uint64_t key) {
    for (auto& s : state_) {
      key = splitmix64(key);
      s = key;
    }
  }
  StreamEngine(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0)
      : StreamEngine(stream_key(seed, a, b, c)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t state_[4];
};

// Stream tags.
inline constexpr std::uint64_t kStreamAlpha = 1;
inline constexpr std::uint64_t kStreamPlant = 2;
inline constexpr std::uint64_t kStreamNetwork = 3;
inline constexpr std::uint64_t kStreamWishart = 4;
inline constexpr std::uint64_t kStreamStudy = 5;

}  // namespace netinf
