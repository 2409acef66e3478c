#include "upasim/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace upasim {
namespace {

int read_env_threads() {
  if (const char* env = std::getenv("UPASIM_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

std::atomic<int>& thread_setting() {
  static std::atomic<int> n{read_env_threads()};
  return n;
}

// Below this many items the thread start-up cost dominates.
constexpr std::size_t kMinItemsPerThread = 4096;

}  // namespace

int thread_count() { return thread_setting().load(); }

void set_thread_count(int n) { thread_setting().store(std::max(1, n)); }

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
  const auto workers =
      std::min<std::size_t>(static_cast<std::size_t>(thread_count()), n / kMinItemsPerThread);
  if (workers <= 1) {
    body(0, n);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 1; w < workers; ++w) {
    const std::size_t b = w * chunk;
    const std::size_t e = std::min(n, b + chunk);
    if (b < e) pool.emplace_back([&body, b, e] { body(b, e); });
  }
  body(0, std::min(n, chunk));
}

}  // namespace upasim
