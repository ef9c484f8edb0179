#pragma once

#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace qfikit {

/// Worker count resolution: an explicit request wins, then the QFI_JOBS
/// environment variable, then hardware concurrency (at least 1).
inline unsigned worker_count(
    std::optional<unsigned> requested = std::nullopt) {
    if (requested && *requested >= 1) return *requested;
    if (const char* env = std::getenv("QFI_JOBS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc >= 1 ? hc : 1;
}

/// Runs fn(i) for i in [0, count) on up to `jobs` threads. Work items are
/// handed out through a shared counter, so the assignment of items to
/// threads is racy but the set of indices processed is not: callers must
/// write results into per-index slots to stay deterministic. The first
/// exception thrown by any item is rethrown after all threads join.
template <typename Fn>
void parallel_for_index(std::size_t count, unsigned jobs, Fn&& fn) {
    if (count == 0) return;
    const std::size_t workers =
        std::min<std::size_t>(jobs >= 1 ? jobs : 1, count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&]() {
        while (!failed.load(std::memory_order_relaxed)) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::scoped_lock lock(error_mutex);
                if (!error) error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(body);
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace qfikit
