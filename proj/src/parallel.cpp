#include "fhl/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace fhl {

unsigned worker_count() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("FHL_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
    if (n == 0) return;
    const std::size_t w = std::min<std::size_t>(worker_count(), n);
    if (w <= 1) {
        body(0, n);
        return;
    }
    std::vector<std::thread> threads;
    std::exception_ptr err;
    std::mutex mu;
    for (std::size_t k = 0; k < w; ++k) {
        const std::size_t b = n * k / w, e = n * (k + 1) / w;
        threads.emplace_back([&, b, e] {
            try {
                body(b, e);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    if (err) std::rethrow_exception(err);
}

void parallel_tasks(std::size_t tasks, const std::function<void(std::size_t)>& body) {
    if (tasks == 0) return;
    const std::size_t w = std::min<std::size_t>(worker_count(), tasks);
    if (w <= 1) {
        for (std::size_t k = 0; k < tasks; ++k) body(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex mu;
    std::vector<std::thread> threads;
    for (std::size_t k = 0; k < w; ++k) {
        threads.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < tasks;) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(mu);
                    if (!err) err = std::current_exception();
                }
            }
        });
    }
    for (auto& t : threads) t.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace fhl
