#pragma once

#include <cstddef>
#include <functional>

namespace upasim {

/// Worker count taken from UPASIM_THREADS (default 1). Read once per process.
int thread_count();

/// Override for tests and benchmarks; values < 1 are clamped to 1.
void set_thread_count(int n);

/// Runs body(begin, end) over disjoint chunks of [0, n). Chunk boundaries depend only on
/// n and the thread count, and bodies must write disjoint outputs, so results are
/// identical for any thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace upasim
