#pragma once

#include <cstdint>

namespace skis {

/// Splittable counter-style generator. Every (seed, stream_id) pair owns its
/// own sequence: the stream id picks both the start state and an odd additive
/// constant, so distinct streams walk distinct orbits and the same pair
/// reproduces byte-identical draws on every platform. No global state, no
/// locking; cheap enough to create one stream per sample.
class RngStream {
 public:
  RngStream() = default;

  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : state_(mix64(seed ^ mix64(stream_id + 0x9E3779B97F4A7C15ull))),
        inc_(mix64((stream_id << 1) ^ mix64(seed + 0xBF58476D1CE4E5B9ull)) | 1ull) {}

  std::uint64_t next_u64() {
    state_ += inc_;
    return mix64(state_);
  }

  /// Uniform in [0, 1), 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [0, bound). bound must be positive.
  std::uint32_t next_below(std::uint32_t bound) {
    return static_cast<std::uint32_t>(
        (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
  }

  bool bernoulli(double p) { return next_unit() < p; }

  static constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_ = 0;
  std::uint64_t inc_ = 0x9E3779B97F4A7C15ull;
};

}  // namespace skis
