#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace ltm {

/// Splits [0, n) into `workers` contiguous chunks and calls
/// fn(worker_index, begin, end) for each, on separate threads when workers > 1.
/// Chunk boundaries depend only on (n, workers). The first exception thrown by
/// any worker is rethrown after all of them have joined.
template <typename Fn>
void parallel_chunks(std::size_t n, unsigned workers, Fn&& fn) {
    workers = std::max(1U, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    auto bounds = [&](unsigned w) { return n * w / workers; };
    if (workers == 1) {
        fn(0U, std::size_t{0}, n);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
            try {
                fn(w, bounds(w), bounds(w + 1));
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace ltm
