#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace manet::sim {

/// SplitMix64 finalizer (Steele, Lea & Flood 2014).
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// 64-bit FNV-1a over the bytes of `s`.
constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// A named random substream of a master seed.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// C++ standard. It is seeded with splitmix64(seed ^ splitmix64(fnv1a(id))),
/// so every (seed, stream-id) pair maps to the same sequence on every
/// platform and distinct ids never share mutable state. Variates are derived
/// with explicit transforms rather than <random> distributions, whose
/// algorithms are implementation-defined.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::string_view stream_id)
      : seed_(seed),
        engine_(splitmix64(seed ^ splitmix64(fnv1a(stream_id)))) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, n). n must be positive.
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform01() * static_cast<double>(n));
  }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Exponential variate with the given rate; throws NonPositiveRate.
  double exponential(double rate);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// Free-function form used by the queueing code.
inline double draw_exponential(RandomStream& stream, double rate) {
  return stream.exponential(rate);
}

}  // namespace manet::sim
