#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace mcdtsf {

// Splits [0, n) into n_chunks contiguous chunks and runs fn(chunk, begin, end)
// over them with up to n_threads workers. The chunking is independent of the
// thread count, so per-chunk outputs (and any in-order reduction over chunks)
// are reproducible for any --jobs setting.
inline void parallel_chunks(int n, int n_chunks, int n_threads,
                            const std::function<void(int, int, int)>& fn) {
  if (n <= 0) return;
  if (n_chunks > n) n_chunks = n;
  if (n_chunks < 1) n_chunks = 1;
  auto chunk_range = [&](int c, int& b, int& e) {
    int base = n / n_chunks, rem = n % n_chunks;
    b = c * base + std::min(c, rem);
    e = b + base + (c < rem ? 1 : 0);
  };
  if (n_threads <= 1 || n_chunks == 1) {
    for (int c = 0; c < n_chunks; ++c) {
      int b, e;
      chunk_range(c, b, e);
      fn(c, b, e);
    }
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex err_mu;
  auto worker = [&] {
    for (;;) {
      int c = next.fetch_add(1);
      if (c >= n_chunks) return;
      int b, e;
      chunk_range(c, b, e);
      try {
        fn(c, b, e);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  int workers = std::min(n_threads, n_chunks);
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int i = 1; i < workers; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

inline int hardware_jobs() {
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace mcdtsf
