#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace looplab {

/// Runs fn(i) for i in [0, n) across up to `jobs` threads. Tasks must write to
/// disjoint slots; results are then independent of scheduling.
template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
    if (jobs == 0) jobs = std::thread::hardware_concurrency();
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    jobs = std::min<std::size_t>(jobs, n);
    std::vector<std::thread> threads;
    threads.reserve(jobs);
    for (unsigned t = 0; t < jobs; ++t) {
        threads.emplace_back([&, t]() {
            for (std::size_t i = t; i < n; i += jobs) fn(i);
        });
    }
    for (auto& th : threads) th.join();
}

} // namespace looplab
