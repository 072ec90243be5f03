#include "quintic/threading.hpp"

#include <atomic>

#include "quintic/errors.hpp"

namespace quintic {

namespace {
std::atomic<int> g_max_threads{0};
}

void set_max_threads(int n) {
    if (n < 0) throw InvalidInput("set_max_threads: thread count must be >= 0");
    g_max_threads.store(n, std::memory_order_relaxed);
}

int max_threads() {
    const int n = g_max_threads.load(std::memory_order_relaxed);
    if (n > 0) return n;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace quintic
