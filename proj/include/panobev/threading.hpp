#pragma once

#include <cstddef>
#include <functional>

namespace panobev {

// Worker count: hardware concurrency capped by the PANOBEV_THREADS
// environment variable (positive integer). Always at least 1.
unsigned worker_count();

// Runs fn over [0, n) split into contiguous blocks, one per worker.
// Output must depend only on the index, not the schedule; all callers
// write disjoint elements so results are identical for any thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace panobev
