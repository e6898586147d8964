#pragma once

#include <cstddef>
#include <functional>

namespace nbcs {

/// Worker count from NBCS_THREADS, else the hardware concurrency (at least 1).
std::size_t default_thread_count();

/// Runs body(i) for i in [0, n) on up to `threads` workers (0 = default).
/// Tasks must not share mutable state. The first exception thrown by any
/// task is rethrown after all workers have joined.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  std::size_t threads = 0);

}  // namespace nbcs
