#include "spherelab/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <mutex>

namespace spherelab {

namespace {

std::atomic<int> g_threads{0};

int detect_threads() {
  if (const char* env = std::getenv("SPHERICAL_LAB_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace

int thread_count() {
  int n = g_threads.load(std::memory_order_relaxed);
  if (n <= 0) {
    n = detect_threads();
    g_threads.store(n, std::memory_order_relaxed);
  }
  return n;
}

void set_thread_count(int n) {
  if (n > 0) g_threads.store(n, std::memory_order_relaxed);
}

void parallel_for(std::int64_t begin, std::int64_t end,
                  const std::function<void(std::int64_t)>& fn) {
  const std::int64_t total = end - begin;
  if (total <= 0) return;
  int workers = thread_count();
  if (workers <= 1 || total == 1) {
    for (std::int64_t i = begin; i < end; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{begin};
  auto worker = [&] {
    for (;;) {
      std::int64_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= end) break;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers - 1));
  for (int t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

void parallel_chunks(std::int64_t begin, std::int64_t end, int chunks,
                     const std::function<void(int, std::int64_t, std::int64_t)>& fn) {
  const std::int64_t total = end - begin;
  if (total <= 0) return;
  if (chunks < 1) chunks = 1;
  if (static_cast<std::int64_t>(chunks) > total) chunks = static_cast<int>(total);
  parallel_for(0, chunks, [&](std::int64_t c) {
    std::int64_t lo = begin + total * c / chunks;
    std::int64_t hi = begin + total * (c + 1) / chunks;
    fn(static_cast<int>(c), lo, hi);
  });
}

}  // namespace spherelab
