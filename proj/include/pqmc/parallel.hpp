#pragma once
#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace pqmc {

// Runs fn(i) for i in [0, count) on up to n_threads workers. Work items are
// claimed through a shared counter; callers must write results into
// index-addressed slots so the outcome does not depend on scheduling.
inline void parallel_for_index(std::size_t count, int n_threads,
                               const std::function<void(std::size_t)>& fn) {
    if (n_threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> nextIndex{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = nextIndex.fetch_add(1);
            if (i >= count) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    const int spawn = std::min<int>(n_threads, static_cast<int>(count));
    pool.reserve(spawn);
    for (int t = 0; t < spawn; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

} // namespace pqmc
