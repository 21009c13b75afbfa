#pragma once

#include <cstddef>
#include <functional>

namespace locsvm {

/// Worker count from LOCSVM_THREADS, else the hardware concurrency.
std::size_t default_thread_count();

/// Runs body(i) for i in [0, n) on up to `threads` workers. Which worker
/// runs an index never affects what body(i) computes. The first exception
/// thrown is rethrown after all workers stop.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body);

}  // namespace locsvm
