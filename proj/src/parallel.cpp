#include "crease/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace crease {

namespace {

int default_threads() {
    if (const char* env = std::getenv("CREASE_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

std::atomic<int> g_threads{0};
thread_local bool tl_in_worker = false;

} // namespace

int thread_count() {
    int n = g_threads.load(std::memory_order_relaxed);
    if (n <= 0) {
        n = default_threads();
        g_threads.store(n, std::memory_order_relaxed);
    }
    return n;
}

void set_thread_count(int n) {
    g_threads.store(n > 0 ? n : default_threads(), std::memory_order_relaxed);
}

void parallel_for(int begin, int end, const std::function<void(int, int)>& fn) {
    const int total = end - begin;
    if (total <= 0) return;
    const int workers = std::min(thread_count(), total);
    if (workers <= 1 || tl_in_worker) {
        fn(begin, end);
        return;
    }
    // Dynamic chunking; safe because callers write disjoint locations only.
    const int chunk = std::max(1, total / (workers * 8));
    std::atomic<int> next{begin};
    auto body = [&]() {
        tl_in_worker = true;
        for (;;) {
            int lo = next.fetch_add(chunk, std::memory_order_relaxed);
            if (lo >= end) break;
            fn(lo, std::min(lo + chunk, end));
        }
        tl_in_worker = false;
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (int i = 1; i < workers; ++i) pool.emplace_back(body);
    body();
    for (auto& t : pool) t.join();
}

} // namespace crease
