#ifndef APPIC_PARALLEL_HPP
#define APPIC_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace appic {

/// Runs body(i) for i in [0, count) on up to `threads` workers. Each index runs exactly
/// once; callers write results into per-index slots so the outcome is independent of
/// scheduling. The exception of the lowest failing index is rethrown.
template<typename Body>
void parallel_for(std::size_t count, std::size_t threads, Body&& body)
{
    if (count == 0)
        return;
    threads = std::clamp<std::size_t>(threads, 1, count);
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i)
            body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(count);
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads - 1);
    for (std::size_t t = 1; t < threads; ++t)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

} // namespace appic

#endif // APPIC_PARALLEL_HPP
