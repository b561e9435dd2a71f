#pragma once

#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace creach {

/// Resolve a --threads style argument: 0 means "use what the hardware has".
inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace detail {

/// Run fn(begin, end) over a contiguous partition of [0, count) on the given
/// number of threads. fn must write only to disjoint state per index range.
/// The first exception thrown by any worker is rethrown here.
template <class Fn>
void parallel_for_ranges(std::uint64_t count, int threads, Fn&& fn) {
    const int t = resolve_threads(threads);
    if (count == 0) return;
    const std::uint64_t workers =
        std::min<std::uint64_t>(static_cast<std::uint64_t>(t), count);
    if (workers <= 1) {
        fn(std::uint64_t{0}, count);
        return;
    }

    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto run = [&](std::uint64_t begin, std::uint64_t end) {
        try {
            fn(begin, end);
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    const std::uint64_t base = count / workers;
    const std::uint64_t extra = count % workers;
    std::uint64_t begin = 0;
    for (std::uint64_t w = 0; w < workers; ++w) {
        const std::uint64_t len = base + (w < extra ? 1 : 0);
        const std::uint64_t end = begin + len;
        if (w + 1 == workers) {
            run(begin, end);
        } else {
            pool.emplace_back(run, begin, end);
        }
        begin = end;
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace detail
} // namespace creach
