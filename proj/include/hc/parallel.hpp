#pragma once

#include <cstddef>
#include <functional>

namespace hc {

/// Worker count: HC_THREADS if set and positive, else the hardware
/// concurrency; at least 1.
unsigned worker_count();

/// Runs f(index) for index in [0, count) on worker_count() threads.
/// Indices are handed out dynamically; callers write results by index so
/// the outcome never depends on the schedule.  The first exception thrown
/// by any task is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& f);

}  // namespace hc
