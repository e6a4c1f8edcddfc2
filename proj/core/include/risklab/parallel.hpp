#pragma once

#include <cstddef>
#include <functional>

namespace risklab {

/// Worker count: RISKLAB_THREADS if set and positive, otherwise the
/// hardware concurrency (at least 1).
int default_thread_count();

/// Run body(i) for i in [0, n) on up to `threads` workers. Each index runs
/// exactly once; the first exception thrown by any body is rethrown.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

}  // namespace risklab
