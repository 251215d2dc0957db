#pragma once

#include <cstddef>
#include <functional>

namespace lobabc {

// Number of workers: LOBABC_WORKERS env var if set, else hardware concurrency.
std::size_t default_workers();

// Runs body(i) for i in [0, n) on up to `workers` threads. Each index is
// processed exactly once; callers write results into index-addressed slots so
// the outcome does not depend on scheduling. The first exception thrown by a
// body is rethrown after all workers join.
void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t)>& body);

}  // namespace lobabc
