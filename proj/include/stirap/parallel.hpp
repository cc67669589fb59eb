#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace stirap {

// Worker count: STIRAP_MAX_WORKERS if set and positive, else the hardware
// concurrency (at least 1).
inline std::size_t worker_count() {
    std::size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("STIRAP_MAX_WORKERS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap > 0) {
            n = static_cast<std::size_t>(cap);
        }
    }
    return n;
}

namespace detail {
inline thread_local bool inside_worker = false;
}

// Runs body(i) for i in [0, count) on up to worker_count() threads. The
// first exception thrown by any task is rethrown after all workers join.
// Nested calls from inside a worker run serially.
template <class Body>
void parallel_for(std::size_t count, Body&& body) {
    const std::size_t workers = detail::inside_worker ? 1 : std::min(worker_count(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                detail::inside_worker = true;
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        body(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) {
                            failure = std::current_exception();
                        }
                    }
                }
            });
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

}  // namespace stirap
