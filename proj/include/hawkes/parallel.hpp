#pragma once

#include <cstddef>
#include <functional>

namespace hawkes {

// Process-wide worker cap. Initialised from HAWKES_THREADS, default 1.
std::size_t thread_count();
void set_thread_count(std::size_t n);

// Runs body(i) for i in [0, n). Each index is handled exactly once; callers
// write results into slot i so output order never depends on scheduling.
// The first exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace hawkes
