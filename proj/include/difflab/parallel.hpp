#pragma once

#include <cstdint>
#include <functional>

namespace difflab {

// Worker cap: DIFFLAB_THREADS env var if set, else hardware concurrency.
int max_threads();

// Static-partition parallel loop. body(i) must only write to slot i of any
// shared output, so the result is independent of the thread count. The
// first exception thrown by any worker is rethrown on the calling thread.
void parallel_for(std::int64_t count, const std::function<void(std::int64_t)>& body);

} // namespace difflab
