#pragma once

#include <cstddef>
#include <functional>

namespace vortex::cli {

// Run fn(0..count-1) on a small worker pool; results must be written to
// index-addressed slots so the output order never depends on scheduling.
// threads <= 0 selects the machine parallelism. The first exception thrown
// by a worker is rethrown on the calling thread.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

} // namespace vortex::cli
