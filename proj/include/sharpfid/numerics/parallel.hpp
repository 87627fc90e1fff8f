#pragma once

#include <cstddef>
#include <functional>

namespace sharpfid::numerics {

/// Runs body(chunk) for chunk in [0, n_chunks) on up to `threads` workers
/// (0 = hardware concurrency). Chunks are independent; the caller reduces the
/// per-chunk results in chunk order. The first exception thrown is rethrown.
void parallel_chunks(std::size_t n_chunks, int threads,
                     const std::function<void(std::size_t)>& body);

/// [begin, end) of chunk `i` when `total` items are split into `n_chunks`.
struct ChunkRange {
  std::size_t begin;
  std::size_t end;
};
ChunkRange chunk_range(std::size_t total, std::size_t n_chunks, std::size_t i);

}  // namespace sharpfid::numerics
