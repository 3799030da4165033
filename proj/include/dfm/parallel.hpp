#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace dfm {

inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Runs `body(begin, end)` over contiguous chunks of [0, n) on up to `threads`
/// workers. Chunk boundaries depend only on n and the chunk count, so any
/// per-index output the body writes is schedule-independent.
template <class Body>
void parallel_for_chunks(std::uint64_t n, unsigned threads, Body&& body) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::uint64_t>(resolve_threads(threads), std::max<std::uint64_t>(n, 1)));
  if (workers <= 1) {
    body(std::uint64_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    const std::uint64_t begin = n * w / workers;
    const std::uint64_t end = n * (w + 1) / workers;
    pool.emplace_back([&, w, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Sum of nonnegative integer partial counts over [0, n). Integer addition is
/// associative, so the result does not depend on the thread count.
template <class Count>
std::uint64_t parallel_count(std::uint64_t n, unsigned threads, Count&& count_range) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::uint64_t>(resolve_threads(threads), std::max<std::uint64_t>(n, 1)));
  std::vector<std::uint64_t> partial(workers, 0);
  parallel_for_chunks(workers, workers, [&](std::uint64_t wb, std::uint64_t we) {
    for (std::uint64_t w = wb; w < we; ++w)
      partial[w] = count_range(n * w / workers, n * (w + 1) / workers);
  });
  std::uint64_t total = 0;
  for (auto v : partial) total += v;
  return total;
}

}  // namespace dfm
