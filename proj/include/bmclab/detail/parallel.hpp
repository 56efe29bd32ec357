#pragma once

#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace bmclab::detail {

/// Runs fn(i) for i in [0, count) across up to `threads` workers. Results
/// must be written to preallocated per-index slots by the callers; the
/// chunking is static so the work split is deterministic.
inline void parallel_for(std::uint64_t count, unsigned threads,
                         const std::function<void(std::uint64_t)>& fn) {
    if (threads <= 1 || count < 2) {
        for (std::uint64_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const unsigned workers = static_cast<unsigned>(
        std::min<std::uint64_t>(threads, count));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::uint64_t i = w; i < count; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace bmclab::detail
