#pragma once

#include <functional>

namespace psit {

// Number of worker threads used by parallel_for. Defaults to the hardware
// concurrency and is capped by the PSIT_THREADS environment variable (values
// below 1 are treated as 1). Read on every call so tests can retune it.
int thread_budget();

// Runs fn(i) for i in [0, n). Work is chunked across threads; every result
// must be written to a slot addressed by i so the outcome is independent of
// the thread count.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace psit
