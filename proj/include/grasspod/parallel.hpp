#pragma once

#include <cstddef>
#include <functional>

namespace grasspod {

/// Worker count: GRASSPOD_THREADS when set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
int thread_limit();

/// Runs fn(0) .. fn(n - 1) on up to thread_limit() threads. Each index is
/// visited once; the first exception thrown is rethrown after all workers
/// finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace grasspod
