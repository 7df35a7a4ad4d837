#pragma once

#include <cstddef>
#include <functional>

namespace crowdagg {

// Number of worker threads to use: min(hardware, CROWDAGG_THREADS if set, n).
int effective_thread_count(size_t n_tasks);

// Runs fn(i) for i in [0, n). Tasks must be independent; output slots are
// per-index so completion order never affects results.
void parallel_for(size_t n, const std::function<void(size_t)>& fn);

}  // namespace crowdagg
