#ifndef SHAPEDIAG_UTIL_PARALLEL_HPP
#define SHAPEDIAG_UTIL_PARALLEL_HPP

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>
#include <exception>
#include <mutex>

namespace shapediag {

// Thread count: SHAPEDIAG_THREADS env var, else hardware concurrency.
inline int thread_count() {
    if (const char* env = std::getenv("SHAPEDIAG_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

// Runs fn(i) for i in [0, n). Each index writes only its own outputs, so
// results are independent of the thread schedule. The first exception thrown
// by any worker is rethrown on the calling thread.
inline void parallel_for(int n, const std::function<void(int)>& fn) {
    int nt = std::min(thread_count(), n);
    if (nt <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> workers;
    std::exception_ptr err;
    std::mutex err_mtx;
    for (int t = 0; t < nt; ++t) {
        workers.emplace_back([&, t]() {
            for (int i = t; i < n; i += nt) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mtx);
                    if (!err) err = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& w : workers) w.join();
    if (err) std::rethrow_exception(err);
}

} // namespace shapediag

#endif
