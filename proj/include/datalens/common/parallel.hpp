#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <utility>
#include <vector>

namespace datalens {

// Runs fn(begin, end, chunk_index) over a fixed grid of chunks. The chunk
// grid depends only on n, never on the worker count, so any reduction that
// combines per-chunk results in chunk order is identical for 1 or N threads.
inline constexpr std::size_t kParallelChunks = 64;

template <class Fn>
void for_chunks(std::size_t n, int threads, Fn&& fn) {
    if (n == 0) return;
    const std::size_t chunks = n < kParallelChunks ? n : kParallelChunks;
    const std::size_t base = n / chunks;
    const std::size_t extra = n % chunks;

    auto chunk_range = [&](std::size_t c) {
        const std::size_t lo = c * base + (c < extra ? c : extra);
        const std::size_t len = base + (c < extra ? 1 : 0);
        return std::pair<std::size_t, std::size_t>{lo, lo + len};
    };

    if (threads <= 1 || chunks == 1) {
        for (std::size_t c = 0; c < chunks; ++c) {
            auto [lo, hi] = chunk_range(c);
            fn(lo, hi, c);
        }
        return;
    }

    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), chunks);
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t c = next.fetch_add(1);
                if (c >= chunks) return;
                auto [lo, hi] = chunk_range(c);
                fn(lo, hi, c);
            }
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace datalens
