#pragma once

#include <cstddef>
#include <cstdlib>
#include <thread>
#include <vector>

namespace pct {

/// Parallelism cap: PCT_THREADS when set (minimum 1), otherwise the hardware
/// concurrency. Callers must keep results index-addressed so scheduling never
/// affects output.
inline std::size_t thread_cap() {
    static const std::size_t cap = [] {
        if (const char* env = std::getenv("PCT_THREADS")) {
            const long v = std::strtol(env, nullptr, 10);
            if (v >= 1) return static_cast<std::size_t>(v);
            return static_cast<std::size_t>(1);
        }
        const unsigned hw = std::thread::hardware_concurrency();
        return static_cast<std::size_t>(hw > 0 ? hw : 1);
    }();
    return cap;
}

template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const std::size_t workers = std::min(thread_cap(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) fn(i);
        });
    }
    for (auto& t : threads) t.join();
}

}  // namespace pct
