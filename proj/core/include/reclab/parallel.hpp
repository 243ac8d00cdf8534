#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace reclab
{
/*!
 * Run f(i) for i in [0, n) on up to `workers` threads.
 *
 * Callers write results by index, so the outcome never depends on scheduling.
 * If several tasks throw, the exception of the lowest index is rethrown.
 */
template<class F>
void parallel_for(std::size_t n, unsigned workers, F&& f)
{
    if (workers <= 1 || n <= 1)
    {
        for (std::size_t i = 0; i < n; ++i)
            f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    std::atomic<bool> failed{false};
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++)
        {
            if (failed.load(std::memory_order_relaxed))
                break;
            try
            {
                f(i);
            }
            catch (...)
            {
                errors[i] = std::current_exception();
                failed = true;
            }
        }
    };
    std::vector<std::thread> pool;
    auto const count = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    pool.reserve(count);
    for (unsigned t = 0; t < count; ++t)
        pool.emplace_back(work);
    for (auto& t : pool)
        t.join();
    for (auto& e : errors)
    {
        if (e)
            std::rethrow_exception(e);
    }
}

}  // namespace reclab
