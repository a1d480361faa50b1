#include "sectoria/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>

namespace sectoria {

namespace {
thread_local bool in_parallel_region = false;
constexpr std::size_t kMinParallelItems = 256;
} // namespace

unsigned thread_cap() {
    if (const char* env = std::getenv("SECTORIA_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const unsigned threads = thread_cap();
    if (n < kMinParallelItems || threads <= 1 || in_parallel_region) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        in_parallel_region = true;
        constexpr std::size_t chunk = 16;
        for (;;) {
            const std::size_t begin = next.fetch_add(chunk);
            if (begin >= n) break;
            const std::size_t end = std::min(begin + chunk, n);
            for (std::size_t i = begin; i < end; ++i) fn(i);
        }
        in_parallel_region = false;
    };
    std::vector<std::thread> pool;
    const unsigned use = std::min<unsigned>(threads, static_cast<unsigned>((n + 15) / 16));
    pool.reserve(use - 1);
    for (unsigned t = 1; t < use; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
}

} // namespace sectoria
