// Copyright 2026 The miesim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef MIESIM_PARALLEL_HPP
#define MIESIM_PARALLEL_HPP

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace miesim {

/// Worker count from MIESIM_THREADS, else the hardware concurrency.
inline std::size_t worker_count() {
    if (const char *env = std::getenv("MIESIM_THREADS")) {
        try {
            long v = std::stol(env);
            if (v >= 1) return static_cast<std::size_t>(v);
        } catch (const std::exception &) {
        }
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

/// Calls fn(i) for every i in [0, n). Work is handed out dynamically, so fn must write its result
/// to a slot indexed by i for the outcome to be independent of the worker count.
template <class Fn>
void parallel_for(std::size_t n, Fn &&fn, std::size_t workers = 0) {
    if (workers == 0) workers = worker_count();
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(n);
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w + 1 < workers; ++w) pool.emplace_back(body);
    body();
    for (auto &t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

/// parallel_for collecting fn(i) into a vector in index order.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, Fn &&fn, std::size_t workers = 0) {
    std::vector<T> out(n);
    parallel_for(n, [&](std::size_t i) { out[i] = fn(i); }, workers);
    return out;
}

}  // namespace miesim

#endif
