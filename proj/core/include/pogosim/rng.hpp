#pragma once

#include <cstdint>
#include <limits>

namespace pogosim {

enum class StreamId : std::uint8_t { motion_noise = 0, sensor_noise = 1, channel = 2, controller = 3, init = 4 };

/// 64-bit avalanche finalizer (splitmix64 output function).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based generator. The sequence is a pure function of
/// (master_seed, entity_id, stream_id): draw i is mix64(key + i * golden).
/// Satisfies UniformRandomBitGenerator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream() = default;
  RngStream(std::uint64_t master_seed, std::uint32_t entity_id, StreamId stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return next_u64(); }
  std::uint64_t next_u64() {
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
  }
  std::uint32_t next_u32() { return static_cast<std::uint32_t>(next_u64() >> 32); }
  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller, clipped to [-clip, clip].
  double normal(double clip = 5.0);
  /// N(0, stddev) clipped at +/-5 sigma. Returns 0 without drawing when stddev == 0.
  double gaussian(double stddev);
  /// Exponential with the given mean.
  double exponential(double mean);

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

inline RngStream derive_rng_stream(std::uint64_t master_seed, std::uint32_t entity_id, StreamId stream) {
  return RngStream(master_seed, entity_id, stream);
}

}  // namespace pogosim
