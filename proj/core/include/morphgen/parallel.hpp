#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace morphgen {

// Static-partition parallel loop. Each index is processed exactly once with
// writes to disjoint locations, so results are bitwise identical for every
// worker count.
template <class Fn>
void parallel_for(size_t n, int threads, Fn&& fn) {
    if (threads <= 1 || n < 4096) {
        fn((size_t)0, n);
        return;
    }
    int workers = std::min<size_t>(threads, (n + 4095) / 4096);
    std::vector<std::thread> pool;
    size_t chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; w++) {
        size_t b = w * chunk;
        size_t e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&fn, b, e] { fn(b, e); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace morphgen
