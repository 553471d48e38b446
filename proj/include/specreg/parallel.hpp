#pragma once

#include <cstddef>
#include <functional>

namespace specreg {

/// Runs body(i) for i in [0, count) on worker threads.  Callers write results
/// into per-index slots and reduce in index order, so results do not depend on
/// the thread count (SPECREG_THREADS, default hardware concurrency).
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);
std::size_t worker_count();

}  // namespace specreg
