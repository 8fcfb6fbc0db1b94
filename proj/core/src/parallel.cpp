#include "finsler/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace finsler {

namespace {
std::atomic<int> g_threads{1};
}

void set_thread_count(int n) { g_threads.store(std::max(1, n)); }
int thread_count() { return g_threads.load(); }

void parallel_rows(int rows, const std::function<void(int)>& fn) {
  int t = std::min(thread_count(), rows);
  if (t <= 1) {
    for (int r = 0; r < rows; ++r) fn(r);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(t);
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (int k = 0; k < t; ++k) {
    int lo = rows * k / t;
    int hi = rows * (k + 1) / t;
    pool.emplace_back([lo, hi, &fn, &first_error, &error_mutex] {
      try {
        for (int r = lo; r < hi; ++r) fn(r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace finsler
