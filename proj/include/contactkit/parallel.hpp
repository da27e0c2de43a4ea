#pragma once

// Data-parallel sweep kernels. Every kernel has a serial path that is kept as
// the reference implementation; the OpenMP path must produce bit-identical
// results (reductions are max/argmax with lowest-index tie breaking, sums are
// formed serially from a per-index buffer).

#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace contactkit {

enum class Execution { Serial, Parallel };

/// Default execution policy used by the verification layers.
inline Execution default_execution() { return Execution::Parallel; }

/// Runs f(i) for i in [0, n). An exception thrown by any f(i) is rethrown
/// after the loop; when several indices throw, the lowest index wins.
template <class F>
void for_each_index(std::size_t n, F&& f, Execution ex = default_execution()) {
    if (ex == Execution::Serial || n < 2) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::vector<std::exception_ptr> errors(n);
    const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 4)
    for (std::int64_t i = 0; i < count; ++i) {
        try {
            f(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

struct MaxResult {
    double value = 0.0;
    std::size_t index = 0;
};

/// max_i f(i) together with the first index attaining it. NaN counts as +inf.
template <class F>
MaxResult max_over(std::size_t n, F&& f, Execution ex = default_execution()) {
    std::vector<double> values(n);
    for_each_index(n, [&](std::size_t i) { values[i] = f(i); }, ex);
    MaxResult best{-std::numeric_limits<double>::infinity(), 0};
    for (std::size_t i = 0; i < n; ++i) {
        const double v = values[i] != values[i] ? std::numeric_limits<double>::infinity() : values[i];
        if (v > best.value) best = {v, i};
    }
    if (n == 0) best.value = 0.0;
    return best;
}

template <class F>
MaxResult min_over(std::size_t n, F&& f, Execution ex = default_execution()) {
    MaxResult r = max_over(n, [&](std::size_t i) { return -f(i); }, ex);
    r.value = -r.value;
    return r;
}

/// Deterministic per-index random stream: stream i of `seed` does not depend
/// on how indices are scheduled across threads.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t stream) {
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ (stream * 0xD1B54A32D192ED03ull)));
}

}  // namespace contactkit
