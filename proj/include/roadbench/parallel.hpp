#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace roadbench::detail {

// Runs fn(i, worker) for i in [0, count) across `threads` workers pulling
// from a shared counter. Results must not depend on which worker handles
// which item; worker ids let callers reuse per-thread scratch state.
template <class Fn>
void parallel_for(std::uint32_t count, unsigned threads, Fn fn) {
    if (threads <= 1 || count <= 1) {
        for (std::uint32_t i = 0; i < count; ++i) fn(i, 0u);
        return;
    }
    unsigned workers = std::min<unsigned>(threads, count);
    std::atomic<std::uint32_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (std::uint32_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i, w);
        });
    for (auto& th : pool) th.join();
}

}  // namespace roadbench::detail
