#pragma once

#include <atomic>
#include <thread>
#include <vector>

namespace hhs::detail {

inline std::atomic<int>& worker_override() {
    static std::atomic<int> v{0};
    return v;
}

inline void set_worker_count(int n) { worker_override().store(n); }

inline int worker_count() {
    int o = worker_override().load();
    if (o > 0) return o;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(i) for i in [0, n); fn must only touch per-index state (or merge
// into per-thread accumulators), so results are order-independent.
template <class F>
void parallel_for(int n, F&& fn) {
    int workers = worker_count() < n ? worker_count() : n;
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                int i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace hhs::detail
