#pragma once

#include <cstddef>
#include <functional>

namespace acdc {

// Worker cap shared by every parallel loop; 0 means hardware concurrency.
void set_max_jobs(std::size_t jobs);
std::size_t max_jobs();

// Runs body(i) for i in [0, n). Indices are split into contiguous chunks, one
// per worker, so results written to slot i are independent of scheduling.
// The first exception thrown by any worker is rethrown after all join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace acdc
