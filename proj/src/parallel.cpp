#include "psit/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace psit {

int thread_budget() {
    unsigned hw = std::thread::hardware_concurrency();
    int budget = hw == 0 ? 1 : static_cast<int>(hw);
    if (const char* env = std::getenv("PSIT_THREADS")) {
        try {
            int cap = std::stoi(env);
            budget = std::min(budget, std::max(1, cap));
        } catch (const std::exception&) {
            // unparseable value: keep the hardware default
        }
    }
    return budget;
}

void parallel_for(int n, const std::function<void(int)>& fn) {
    if (n <= 0) return;
    int workers = std::min(thread_budget(), n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            // contiguous chunks; slot-addressed writes keep this deterministic
            int lo = static_cast<int>(static_cast<long long>(n) * w / workers);
            int hi = static_cast<int>(static_cast<long long>(n) * (w + 1) / workers);
            for (int i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace psit
