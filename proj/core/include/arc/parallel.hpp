#pragma once

#include <cstddef>
#include <functional>

namespace arc {

/// Runs body(0) ... body(count-1) on up to `threads` workers.
///
/// Tasks must write only to their own slot; callers then reduce in index
/// order, which keeps outputs independent of the thread count. If several
/// tasks throw, the exception of the lowest index is rethrown.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

/// Thread count from ARC_ROBUST_THREADS when set to a positive integer,
/// otherwise `fallback`.
std::size_t threads_from_env(std::size_t fallback);

}  // namespace arc
