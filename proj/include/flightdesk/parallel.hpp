#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace flightdesk {

inline unsigned default_thread_count() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

// Runs fn(i) for i in [0, count). Work is claimed dynamically, so results must
// not depend on which thread runs which index. The first exception thrown by
// any worker is rethrown on the calling thread.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    if (count == 0) return;
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count || failed.load(std::memory_order_relaxed)) return;
            try {
                fn(i);
            } catch (...) {
                if (!failed.exchange(true)) error = std::current_exception();
                return;
            }
        }
    };
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

// Fixed-slot variant: index i is processed by slot (i % slots), and each slot
// handles its indices in increasing order. Lets per-slot accumulators be
// combined in slot order afterwards, giving results that are independent of
// the actual thread count.
template <typename Fn>
void parallel_for_slots(std::size_t count, unsigned slots, unsigned threads, Fn&& fn) {
    if (count == 0) return;
    slots = std::max(1u, slots);
    parallel_for(std::min<std::size_t>(slots, count), threads, [&](std::size_t slot) {
        for (std::size_t i = slot; i < count; i += slots) fn(slot, i);
    });
}

}  // namespace flightdesk
