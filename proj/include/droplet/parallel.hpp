#pragma once

#include <cstddef>
#include <functional>

namespace droplet {

/// Worker count from DROPLET_THREADS (0 or unset = hardware concurrency).
unsigned worker_count();

/// Runs body(begin, end) over [0, n) split into contiguous chunks.
///
/// Chunks never share indices, so a body that writes only to its own range is
/// race free and its result is independent of the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk = 64);

} // namespace droplet
