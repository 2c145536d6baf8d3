#pragma once

#include <cstddef>
#include <functional>

namespace dmatch {

// Worker count: DMATCH_THREADS if set and positive, otherwise the hardware
// concurrency (at least 1).
std::size_t worker_count();

// Runs body(k) for k in [0, count) on up to worker_count() threads. Work is
// handed out dynamically; the first exception thrown is rethrown after all
// workers stop.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace dmatch
