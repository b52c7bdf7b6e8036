#pragma once

#include <algorithm>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace msond {

/// Evaluates fn(0..count-1) on `workers` threads and returns the results in
/// index order. The first exception thrown by any call is rethrown.
template <typename T>
std::vector<T> parallel_map(std::size_t count, std::size_t workers, const std::function<T(std::size_t)>& fn)
{
    std::vector<std::optional<T>> slots(count);
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));

    std::exception_ptr failure;
    std::mutex failure_mutex;
    const auto work = [&](std::size_t first) {
        try {
            for (std::size_t i = first; i < count; i += workers) {
                slots[i].emplace(fn(i));
            }
        } catch (...) {
            const std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) {
                failure = std::current_exception();
            }
        }
    };

    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back(work, w);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    std::vector<T> out;
    out.reserve(count);
    for (auto& slot : slots) {
        out.push_back(std::move(*slot));
    }
    return out;
}

}  // namespace msond
