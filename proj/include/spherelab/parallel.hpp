#pragma once

#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace spherelab {

// Worker-pool size: SPHERICAL_LAB_THREADS env var, then --threads via
// set_thread_count, then hardware concurrency.
int thread_count();
void set_thread_count(int n);

// Static chunked loop over [begin, end); fn(i) must be data-parallel.
void parallel_for(std::int64_t begin, std::int64_t end,
                  const std::function<void(std::int64_t)>& fn);

// Chunked loop: fn(chunk_begin, chunk_end).  Chunk boundaries depend only on
// (begin, end, chunks), never on the thread count, so per-chunk results can
// be combined in chunk order for reductions that must not depend on --threads.
void parallel_chunks(std::int64_t begin, std::int64_t end, int chunks,
                     const std::function<void(int, std::int64_t, std::int64_t)>& fn);

// Deterministic reduction: partials are produced per chunk and combined in
// chunk index order.
template <class T, class ChunkFn, class CombineFn>
T parallel_reduce(std::int64_t begin, std::int64_t end, int chunks, T init,
                  ChunkFn&& chunk_fn, CombineFn&& combine) {
  if (chunks < 1) chunks = 1;
  std::vector<T> partials(static_cast<std::size_t>(chunks), init);
  parallel_chunks(begin, end, chunks,
                  [&](int c, std::int64_t lo, std::int64_t hi) {
                    partials[static_cast<std::size_t>(c)] = chunk_fn(lo, hi);
                  });
  T out = init;
  for (const T& p : partials) out = combine(out, p);
  return out;
}

}  // namespace spherelab
