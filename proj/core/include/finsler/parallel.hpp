#pragma once

// Row-sliced parallelism for grid maps. Work is partitioned by row index
// only, and each row's computation is independent of the thread layout, so
// results are bitwise identical for any thread count.

#include <functional>

namespace finsler {

void set_thread_count(int n);
int thread_count();

void parallel_rows(int rows, const std::function<void(int)>& fn);

}  // namespace finsler
