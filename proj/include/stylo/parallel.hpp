// Index-parallel loop over a fixed worker pool.
#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace stylo {

// Calls fn(i) for i in [0, n). The first exception thrown by any call is
// rethrown after all workers stop.
template <typename F>
void parallel_for(size_t n, int workers, F&& fn) {
    std::atomic<size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = n;
            }
        }
    };
    size_t k = std::min<size_t>(static_cast<size_t>(std::max(1, workers)), std::max<size_t>(n, 1));
    if (k == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (size_t i = 0; i < k; ++i) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace stylo
