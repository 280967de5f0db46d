#pragma once

#include <cstddef>
#include <functional>

namespace tpshift {

// Worker cap from TPSHIFT_THREADS: unset means hardware concurrency, 0 or 1
// means run on the calling thread.
std::size_t worker_count();

// Runs body(i) for i in [0, n). Each index is handled exactly once; callers
// write results by index so the outcome does not depend on scheduling. The
// first exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace tpshift
