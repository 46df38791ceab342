#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "bflim/common.hpp"

namespace bflim {

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
}

void parallel_chunks(std::size_t nchunks, int threads,
                     const std::function<void(std::size_t)>& chunk_fn) {
    if (nchunks == 0) return;
    const std::size_t workers = std::min<std::size_t>(
        nchunks, threads > 1 ? static_cast<std::size_t>(threads) : 1);
    if (workers <= 1) {
        for (std::size_t c = 0; c < nchunks; ++c) chunk_fn(c);
        return;
    }

    std::mutex err_mutex;
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t c = w; c < nchunks; c += workers)
                    chunk_fn(c);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace bflim
