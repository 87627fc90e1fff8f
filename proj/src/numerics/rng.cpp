#include "sharpfid/numerics/rng.hpp"

namespace sharpfid::numerics {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(mix64(mix64(seed) ^ mix64(~stream_id))) {}

double RngStream::uniform() noexcept {
  // 53 random bits, shifted by half a step so 0 and 1 are never returned.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1p-53;
}

}  // namespace sharpfid::numerics
