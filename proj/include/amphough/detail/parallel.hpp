#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace amphough::detail {

/**
 * Runs fn(begin, end) over an even partition of [0, n). Each index is
 * processed by exactly one invocation, so outputs written per-index are
 * identical for every thread count. threads <= 0 selects the hardware
 * concurrency.
 */
inline void parallel_for(std::size_t n, int threads,
                         const std::function<void(std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    std::size_t nt = threads > 0 ? static_cast<std::size_t>(threads)
                                 : std::max(1u, std::thread::hardware_concurrency());
    nt = std::min(nt, n);
    if (nt <= 1) {
        fn(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nt);
    const std::size_t chunk = (n + nt - 1) / nt;
    for (std::size_t t = 0; t < nt; ++t) {
        const std::size_t begin = t * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back(fn, begin, end);
    }
    for (auto& th : pool) th.join();
}

} // namespace amphough::detail
