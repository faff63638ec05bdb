#include "baf/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <mutex>
#include <thread>

namespace baf {

unsigned worker_count()
{
    if (const char* env = std::getenv("BAF_WORKERS"); env != nullptr && *env != '\0') {
        unsigned v = 0;
        const char* end = env + std::strlen(env);
        auto [ptr, ec] = std::from_chars(env, end, v);
        if (ec == std::errc{} && ptr == end && v > 0)
            return v;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void for_each_chunk(std::uint64_t n, std::uint64_t chunk, unsigned workers,
                    const std::function<void(std::uint64_t, std::uint64_t, std::size_t)>& fn)
{
    const std::size_t chunks = chunk_count(n, chunk);
    if (chunks == 0)
        return;
    const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), chunks));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto work = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1, std::memory_order_relaxed);
            if (c >= chunks)
                return;
            const std::uint64_t begin = c * chunk;
            const std::uint64_t end = std::min(n, begin + chunk);
            try {
                fn(begin, end, c);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next.store(chunks, std::memory_order_relaxed);
                return;
            }
        }
    };

    if (threads == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(work);
    }
    if (failure)
        std::rethrow_exception(failure);
}

} // namespace baf
