#pragma once

#include <cstddef>
#include <functional>

namespace contacton {

// Worker count from CONTACTON_THREADS, defaulting to the hardware concurrency.
int worker_count();

// Runs body(i) for i in [0, count) over contiguous blocks. Each index is
// visited exactly once, so results written per index are deterministic.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace contacton
