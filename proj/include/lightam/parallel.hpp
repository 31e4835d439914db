#pragma once

// Deterministic reductions: the index space is split into fixed blocks
// independent of the thread count, each block is summed sequentially and
// the block partials are combined pairwise.

#include <cstddef>
#include <vector>

#include "lightam/vec3.hpp"

namespace lightam {

inline constexpr std::size_t kReduceBlock = 512;

template <class T>
T pairwise_combine(std::vector<T>& parts) {
    if (parts.empty()) return T{};
    std::size_t n = parts.size();
    while (n > 1) {
        const std::size_t half = (n + 1) / 2;
        for (std::size_t i = 0; i + half < n; ++i) parts[i] = parts[i] + parts[i + half];
        n = half;
    }
    return parts[0];
}

template <class T, class F>
T parallel_sum(std::size_t n, F&& term) {
    const std::size_t nb = (n + kReduceBlock - 1) / kReduceBlock;
    std::vector<T> parts(nb, T{});
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nb); ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * kReduceBlock;
        const std::size_t hi = lo + kReduceBlock < n ? lo + kReduceBlock : n;
        T acc{};
        for (std::size_t i = lo; i < hi; ++i) acc = acc + term(i);
        parts[b] = acc;
    }
    return pairwise_combine(parts);
}

template <class F>
void parallel_for(std::size_t n, F&& body) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) body(static_cast<std::size_t>(i));
}

namespace reference {

// Plain left-to-right accumulation, kept as the serial baseline.
template <class T, class F>
T serial_sum(std::size_t n, F&& term) {
    T acc{};
    for (std::size_t i = 0; i < n; ++i) acc = acc + term(i);
    return acc;
}

}  // namespace reference

int thread_count();

}  // namespace lightam
