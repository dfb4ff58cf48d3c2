#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace incilab::detail {

// Static blocks + atomic cursor: the partition is independent of the worker
// count, so per-block partial results reduce to identical totals for any
// number of workers (integer sums exactly, block-ordered float sums bitwise).
template <typename Fn>
inline void parallel_blocks(std::size_t n, int workers, std::size_t block, Fn&& body) {
    if (workers <= 1 || n <= block) {
        for (std::size_t b = 0; b * block < n; ++b)
            body(b * block, std::min(n, (b + 1) * block));
        return;
    }
    std::atomic<std::size_t> next{0};
    auto run = [&] {
        for (;;) {
            std::size_t b = next.fetch_add(1);
            std::size_t lo = b * block;
            if (lo >= n) return;
            body(lo, std::min(n, lo + block));
        }
    };
    std::vector<std::thread> pool;
    int count = std::min<int>(workers, static_cast<int>((n + block - 1) / block));
    pool.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) pool.emplace_back(run);
    for (auto& t : pool) t.join();
}

}  // namespace incilab::detail
