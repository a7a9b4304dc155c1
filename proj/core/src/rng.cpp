#include "pogosim/rng.hpp"

#include <cmath>
#include <numbers>

namespace pogosim {

RngStream::RngStream(std::uint64_t master_seed, std::uint32_t entity_id, StreamId stream) {
  std::uint64_t k = mix64(master_seed ^ 0x5851f42d4c957f2dULL);
  k = mix64(k ^ (static_cast<std::uint64_t>(entity_id) * 0xd1b54a32d192ed03ULL));
  k = mix64(k ^ ((static_cast<std::uint64_t>(stream) + 1) * 0xaef17502108ef2d9ULL));
  key_ = k;
}

double RngStream::normal(double clip) {
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  if (z > clip) z = clip;
  if (z < -clip) z = -clip;
  return z;
}

double RngStream::gaussian(double stddev) {
  if (stddev == 0.0) return 0.0;
  return stddev * normal(5.0);
}

double RngStream::exponential(double mean) { return -mean * std::log(1.0 - uniform()); }

}  // namespace pogosim
