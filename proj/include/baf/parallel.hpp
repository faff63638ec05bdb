#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace baf {

/// Worker count from BAF_WORKERS, falling back to the hardware concurrency.
/// Never returns 0.
unsigned worker_count();

/// Splits [0, n) into fixed-size chunks and evaluates `fn(begin, end, chunk_index)`
/// for every chunk on up to `workers` threads. Chunk boundaries depend only on
/// `n` and `chunk`, never on `workers`, so any reduction over the chunk index is
/// scheduler-invariant.
void for_each_chunk(std::uint64_t n, std::uint64_t chunk, unsigned workers,
                    const std::function<void(std::uint64_t, std::uint64_t, std::size_t)>& fn);

inline constexpr std::uint64_t kDefaultChunk = 1u << 15;

inline std::size_t chunk_count(std::uint64_t n, std::uint64_t chunk)
{
    return static_cast<std::size_t>((n + chunk - 1) / chunk);
}

} // namespace baf
