#pragma once

#include <cstddef>
#include <functional>

namespace logbarrier {

// Environment variable consulted for the default number of worker threads.
inline constexpr const char* kThreadsEnvVar = "LOGBARRIER_THREADS";

// Value of LOGBARRIER_THREADS if set to a positive integer, otherwise the
// hardware concurrency (at least 1).
std::size_t default_thread_count();

// Calls fn(i) for i in [0, n) on up to `threads` workers. fn must be safe to
// call concurrently for distinct i. The first exception thrown is rethrown.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace logbarrier
