// Minimal deterministic parallel-for: work items are indexed, workers take
// disjoint strides, and callers merge results in index order.
#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace blockip {

// fn(index, worker): worker ids are dense in [0, min(threads, count)) and
// each index is visited by exactly one worker.
template <typename Fn>
void parallel_for(size_t count, size_t threads, Fn&& fn) {
    if (threads <= 1 || count <= 1) {
        for (size_t i = 0; i < count; ++i) fn(i, 0);
        return;
    }
    size_t workers = std::min(threads, count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (size_t t = 0; t < workers; ++t) {
        pool.emplace_back([&, t] {
            for (size_t i = t; i < count; i += workers) fn(i, t);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace blockip
