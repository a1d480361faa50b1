#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace sectoria {

/// Thread cap: SECTORIA_THREADS env var, else hardware concurrency.
unsigned thread_cap();

/// Evaluates fn(i) for i in [0, n) into an index-ordered result vector,
/// possibly across threads.  Callers reduce the returned vector serially,
/// so results are independent of the thread count.  Nested calls run
/// sequentially.
template <typename T>
std::vector<T> parallel_map(std::size_t n, const std::function<T(std::size_t)>& fn);

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

template <typename T>
std::vector<T> parallel_map(std::size_t n, const std::function<T(std::size_t)>& fn) {
    std::vector<T> out(n);
    parallel_for(n, [&](std::size_t i) { out[i] = fn(i); });
    return out;
}

} // namespace sectoria
