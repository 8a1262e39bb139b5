#pragma once

// Minimal fork-join helper. Work is split into contiguous index blocks whose
// boundaries depend only on the problem size, so every result that is
// written per index is identical for any thread count.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace etadist {

inline std::atomic<unsigned>& thread_setting()
{
    static std::atomic<unsigned> n{0};
    return n;
}

// 0 restores the default (hardware concurrency).
inline void set_thread_count(unsigned n) { thread_setting() = n; }

inline unsigned thread_count()
{
    unsigned n = thread_setting();
    if (n == 0)
        n = std::max(1u, std::thread::hardware_concurrency());
    return n;
}

// Calls body(begin, end) over disjoint chunks covering [0, n).
template<class Body>
void parallel_blocks(std::size_t n, Body&& body, std::size_t min_block = 1)
{
    if (n == 0)
        return;
    std::size_t workers = std::min<std::size_t>(thread_count(), (n + min_block - 1) / min_block);
    if (workers <= 1) {
        body(std::size_t{0}, n);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_lock;
    std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        std::size_t b = w * chunk, e = std::min(n, b + chunk);
        if (b >= e)
            break;
        pool.emplace_back([&, b, e] {
            try {
                body(b, e);
            } catch (...) {
                std::lock_guard<std::mutex> g(failure_lock);
                if (!failure)
                    failure = std::current_exception();
            }
        });
    }
    for (auto& t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
}

template<class Body>
void parallel_for(std::size_t n, Body&& body)
{
    parallel_blocks(n, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i)
            body(i);
    });
}

} // namespace etadist
