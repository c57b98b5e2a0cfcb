#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

#include "gammastein/rng.hpp"

namespace gammastein {

/// Samples per deterministic chunk. Chunk boundaries never depend on the
/// number of threads, so chunk-wise results are reproducible.
inline constexpr std::size_t kChunkSize = std::size_t{1} << 15;

inline std::size_t chunk_count(std::size_t n) {
  return (n + kChunkSize - 1) / kChunkSize;
}

/// Stream seed for chunk i of a run seeded with `seed`: the user seed is
/// hashed first, then XOR-split, so nearby user seeds do not share chunk
/// streams.
inline std::uint64_t chunk_seed(std::uint64_t seed, std::size_t chunk) {
  return derive_seed(seed, 0) ^ static_cast<std::uint64_t>(chunk);
}

/// Worker count: STEIN_THREADS if set and positive, otherwise the hardware
/// concurrency (at least 1).
std::size_t default_thread_count();

/// Runs body(i) for every i in [0, count) on up to `threads` workers.
/// threads == 0 means default_thread_count(). Exceptions from body are
/// rethrown on the calling thread (the first one wins).
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace gammastein
