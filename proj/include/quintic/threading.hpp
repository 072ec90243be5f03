#pragma once

// Minimal fork-join helper for the path loops.  Work is split into fixed
// chunks by index range, so results land in preallocated slots and the output
// is bit-identical no matter how many threads run.

#include <cstdint>
#include <thread>
#include <vector>

namespace quintic {

// 0 = follow std::thread::hardware_concurrency().
void set_max_threads(int n);
int max_threads();

template <class F>
void parallel_for(std::int64_t begin, std::int64_t end, const F& body) {
    const std::int64_t count = end - begin;
    if (count <= 0) return;
    int threads = max_threads();
    if (threads > count) threads = static_cast<int>(count);
    if (threads <= 1) {
        body(begin, end);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    const std::int64_t chunk = (count + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const std::int64_t lo = begin + t * chunk;
        const std::int64_t hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&body, lo, hi] { body(lo, hi); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace quintic
