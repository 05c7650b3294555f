#pragma once

#include <cstddef>
#include <functional>

namespace qvibe {

/// Worker count: QVIBE_THREADS when set and positive, else hardware concurrency.
[[nodiscard]] unsigned worker_count();

/// Calls fn(i) for i in [0, n) across worker_count() threads. Each index runs
/// exactly once; the first exception thrown is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace qvibe
