#ifndef SPLP_PARALLEL_HPP
#define SPLP_PARALLEL_HPP

#include "splp/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace splp {

/// Thread count: `requested` when positive, else SPLP_THREADS, else the
/// hardware concurrency (at least 1).
unsigned resolve_threads(unsigned requested = 0);

/**
 * Fills `count` slots by calling draw(rng) sequentially inside fixed-size
 * blocks. Block k always uses RngStream(seed, stream_base + k), so the output
 * is identical for every thread count.
 */
template <class T, class Draw>
std::vector<T> generate_blocks(std::size_t count, std::size_t block_size, unsigned threads,
                               std::uint64_t seed, std::uint64_t stream_base, Draw draw) {
    std::vector<T> out(count);
    if (count == 0) return out;
    block_size = std::max<std::size_t>(1, block_size);
    const std::size_t blocks = (count + block_size - 1) / block_size;
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    const auto worker = [&]() {
        while (true) {
            const std::size_t k = next.fetch_add(1);
            if (k >= blocks) return;
            {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (failure) return;
            }
            try {
                RngStream rng(seed, stream_base + k);
                const std::size_t end = std::min(count, (k + 1) * block_size);
                for (std::size_t i = k * block_size; i < end; ++i) out[i] = draw(rng);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };

    const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(blocks)));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n);
        for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

}  // namespace splp

#endif  // SPLP_PARALLEL_HPP
