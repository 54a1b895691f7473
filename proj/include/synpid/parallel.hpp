#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace synpid {

inline unsigned resolve_threads(unsigned requested)
{
    if (requested != 0) {
        return requested;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Splits [0, n) into at most `workers` contiguous chunks and runs
/// f(begin, end, chunk) on each in its own thread. The first exception thrown
/// by any chunk is rethrown after all threads join.
template <class F>
void parallel_chunks(std::size_t n, unsigned workers, F&& f)
{
    workers = static_cast<unsigned>(std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1)));
    if (workers == 1) {
        f(std::size_t{0}, n, 0u);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t begin = n * w / workers;
            const std::size_t end = n * (w + 1) / workers;
            pool.emplace_back([&, begin, end, w] {
                try {
                    f(begin, end, w);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

} // namespace synpid
