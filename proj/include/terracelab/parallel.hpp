#pragma once

#include <cstddef>
#include <functional>

namespace terracelab {

// Worker count from TERRACELAB_WORKERS, else the hardware concurrency (>= 1).
int default_workers();

// Runs fn(i) for i in [0, n) on up to `workers` threads. Each index must write
// only its own output slot, so results do not depend on scheduling. If several
// calls throw, the exception of the lowest index is rethrown.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace terracelab
