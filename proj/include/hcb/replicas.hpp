#pragma once

#include <cstdint>
#include <vector>

namespace hcb {

// Replica i always uses stream-derived randomness keyed by i, so both drivers
// return identical vectors; the parallel one just spreads the indices over threads.
template <class Fn>
auto run_replicas_serial(std::uint64_t count, Fn&& fn) {
    std::vector<decltype(fn(std::uint64_t{0}))> out(count);
    for (std::uint64_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
}

template <class Fn>
auto run_replicas_parallel(std::uint64_t count, Fn&& fn) {
    std::vector<decltype(fn(std::uint64_t{0}))> out(count);
    const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = fn(static_cast<std::uint64_t>(i));
    return out;
}

template <class Fn>
auto run_replicas(std::uint64_t count, Fn&& fn, bool parallel = true) {
    return parallel ? run_replicas_parallel(count, fn) : run_replicas_serial(count, fn);
}

}  // namespace hcb
