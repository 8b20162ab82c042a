#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace peertruth {

// Runs fn(i) for i in [0, n). Work items must be independent and write only
// to their own slots; results are then identical to the serial order.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
    if (threads <= 0) {
        threads = static_cast<int>(std::thread::hardware_concurrency());
        if (threads <= 0) threads = 1;
    }
    if (threads == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t worker_count = std::min<std::size_t>(threads, n);
    std::vector<std::thread> workers;
    workers.reserve(worker_count);
    for (std::size_t w = 0; w < worker_count; ++w) {
        workers.emplace_back([&fn, w, n, worker_count] {
            for (std::size_t i = w; i < n; i += worker_count) fn(i);
        });
    }
    for (auto& t : workers) t.join();
}

}  // namespace peertruth
