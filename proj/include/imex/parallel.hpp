#pragma once

#include <cstddef>
#include <functional>

namespace imex {

// Worker count: min(IMEX_THREADS, hardware concurrency), at least 1.
int thread_cap();

// Runs body(i) for i in [0, n) on up to `threads` workers; threads <= 0 uses thread_cap().
// The first exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

}  // namespace imex
