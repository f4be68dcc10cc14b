#pragma once

#include <cstddef>
#include <functional>

namespace specsense {

/// Worker count used when a caller passes 0: hardware concurrency, at least 1.
std::size_t default_threads() noexcept;

/// Runs body(i) for i in [0, count) on up to `threads` workers. Each index is
/// executed exactly once; callers write results into per-index slots, so the
/// outcome never depends on scheduling. The first exception is rethrown.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace specsense
