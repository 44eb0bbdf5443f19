#ifndef ASCLT_PARALLEL_HPP
#define ASCLT_PARALLEL_HPP

// Deterministic parallel map. Results land at their own index, so the output
// never depends on scheduling or on the thread count.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

namespace asclt
{

/// 0 means one thread per hardware core.
[[nodiscard]] inline std::size_t resolve_threads(std::size_t requested) noexcept
{
    if (requested != 0)
        return requested;
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// out[i] = f(i) for i in [0, count). If several calls throw, the exception of
/// the lowest index is rethrown after all workers have stopped.
template <class F>
[[nodiscard]] auto parallel_map(std::size_t count, std::size_t threads, F&& f)
    -> std::vector<std::invoke_result_t<F&, std::size_t>>
{
    using T = std::invoke_result_t<F&, std::size_t>;
    std::vector<std::optional<T>> slots(count);
    std::size_t const workers = std::min(resolve_threads(threads), std::max<std::size_t>(count, 1));

    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    std::size_t error_index = count;

    auto work = [&] {
        for (;;)
        {
            std::size_t const i = next.fetch_add(1);
            if (i >= count)
                return;
            try
            {
                slots[i].emplace(f(i));
            }
            catch (...)
            {
                std::lock_guard lock(error_mutex);
                if (i < error_index)
                {
                    error_index = i;
                    error = std::current_exception();
                }
            }
        }
    };

    if (workers <= 1)
        work();
    else
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back(work);
    }
    if (error)
        std::rethrow_exception(error);

    std::vector<T> out;
    out.reserve(count);
    for (auto& s : slots)
        out.push_back(std::move(*s));
    return out;
}

} // namespace asclt

#endif
