#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace concentra {

// Worker cap: CONCENTRA_THREADS if set (>= 1), else the hardware count.
inline int thread_budget() {
    if (const char* env = std::getenv("CONCENTRA_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1 && v <= 1024) return static_cast<int>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Applies fn to every index in [0, count); result i lands in slot i, so the
// output (and, via the lowest-index rule, any rethrown error) is independent
// of how the work was scheduled.
template <typename T, typename Fn>
std::vector<T> parallel_map(int count, Fn&& fn) {
    std::vector<T> out(static_cast<std::size_t>(count < 0 ? 0 : count));
    const int workers = std::min(count, thread_budget());
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) out[i] = fn(i);
        return out;
    }
    std::vector<std::exception_ptr> errors(out.size());
    std::atomic<int> cursor{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = cursor.fetch_add(1); i < count; i = cursor.fetch_add(1)) {
                try {
                    out[i] = fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    for (const std::exception_ptr& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

}  // namespace concentra
