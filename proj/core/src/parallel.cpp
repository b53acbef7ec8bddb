// Copyright the dreg authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#include "dreg/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace dreg {

namespace {
std::atomic<int> g_threads{1};
}

void set_thread_count(int n) { g_threads.store(std::max(1, n)); }

int thread_count() { return g_threads.load(); }

void parallel_for(std::int64_t begin, std::int64_t end,
                  const std::function<void(std::int64_t, std::int64_t)>& fn) {
    const std::int64_t count = end - begin;
    if (count <= 0) {
        return;
    }
    const int threads = std::min<std::int64_t>(g_threads.load(), count);
    if (threads <= 1) {
        fn(begin, end);
        return;
    }
    const std::int64_t chunk = (count + threads - 1) / threads;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads) - 1);
    for (int t = 1; t < threads; ++t) {
        const std::int64_t lo = begin + t * chunk;
        const std::int64_t hi = std::min(end, lo + chunk);
        if (lo < hi) {
            pool.emplace_back(fn, lo, hi);
        }
    }
    fn(begin, std::min(end, begin + chunk));
    for (auto& th : pool) {
        th.join();
    }
}

}  // namespace dreg
