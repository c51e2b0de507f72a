#pragma once

#include <functional>

namespace smmvs {

/// Worker count: SMM_SERVO_THREADS environment variable, where 0 or unset
/// means hardware concurrency.
int worker_count();

/// Runs fn(i) for i in [0, n), splitting contiguous chunks across workers.
/// fn must write only to its own output slots; chunking never changes results.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace smmvs
