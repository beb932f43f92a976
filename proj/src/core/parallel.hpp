#pragma once

#include <cstddef>
#include <functional>

namespace supenv {

// Worker count for node-parallel loops. Initialized from SUPENV_THREADS,
// falling back to the hardware concurrency; 0 restores that default.
int thread_count();
void set_thread_count(int threads);

// Runs body(i) for i in [0, n). Each index is visited exactly once, so results
// written to distinct slots are independent of the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace supenv
