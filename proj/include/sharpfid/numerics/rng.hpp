#pragma once

#include <cstdint>
#include <random>

namespace sharpfid::numerics {

/// Seeded uniform source. Streams with the same (seed, stream_id) produce
/// bit-identical sequences on every platform: the engine is mt19937_64 and the
/// uniform mapping is done here rather than through std::uniform_real_distribution.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  /// Uniform on the open interval (0, 1).
  double uniform() noexcept;

  /// Independent stream derived from this one's seed.
  RngStream substream(std::uint64_t id) const { return RngStream(seed_, id); }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; used to decorrelate (seed, stream) pairs.
std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace sharpfid::numerics
