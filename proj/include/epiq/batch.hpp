#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <thread>
#include <type_traits>
#include <vector>

#include "epiq/random.hpp"

namespace epiq {

// Runs fn(replication_index, rng) for indices 0..count-1 and returns the
// results ordered by index. Replication i always draws from
// RandomSource::for_replication(seed, i), so the output is identical for any
// worker count. workers == 0 picks the hardware concurrency.
template <typename Fn>
auto run_replications(std::size_t count, std::uint64_t seed, unsigned workers, Fn&& fn)
    -> std::vector<std::invoke_result_t<Fn&, std::size_t, RandomSource&>> {
    using Result = std::invoke_result_t<Fn&, std::size_t, RandomSource&>;
    std::vector<Result> results(count);
    if (count == 0) return results;

    std::size_t pool_size = workers == 0 ? std::thread::hardware_concurrency() : workers;
    if (pool_size == 0) pool_size = 1;
    if (pool_size > count) pool_size = count;

    if (pool_size == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            RandomSource rng = RandomSource::for_replication(seed, i);
            results[i] = fn(i, rng);
        }
        return results;
    }

    constexpr std::size_t kChunk = 64;
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::atomic<bool> failed{false};

    auto worker = [&] {
        for (;;) {
            const std::size_t begin = next.fetch_add(kChunk, std::memory_order_relaxed);
            if (begin >= count || failed.load(std::memory_order_relaxed)) return;
            const std::size_t end = std::min(begin + kChunk, count);
            try {
                for (std::size_t i = begin; i < end; ++i) {
                    RandomSource rng = RandomSource::for_replication(seed, i);
                    results[i] = fn(i, rng);
                }
            } catch (...) {
                if (!failed.exchange(true)) first_error = std::current_exception();
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(pool_size);
    for (std::size_t w = 0; w < pool_size; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failed.load()) std::rethrow_exception(first_error);
    return results;
}

} // namespace epiq
