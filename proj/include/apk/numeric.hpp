#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace apk {

/// Pairwise (cascade) summation; the result depends only on the order of
/// the input, never on how the caller produced it.
template <typename T>
T pairwise_sum(std::span<const T> xs) {
    constexpr std::size_t kBlock = 32;
    if (xs.size() <= kBlock) {
        T s{};
        for (const T& x : xs) s += x;
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

inline double pairwise_sum(const std::vector<double>& xs) { return pairwise_sum(std::span<const double>(xs)); }

/// Volume of the Euclidean ball of radius R in R^n.
double ball_volume(std::size_t n, double R);

/// Result of a limsup surrogate over a radius schedule.
struct TailSummary {
    double max = 0.0;
    double min = 0.0;
    double mean = 0.0;
    /// (max - min) / max over the tail; 0 when the tail is identically zero.
    double relative_spread = 0.0;
};

/// Summarises the last ceil(fraction * n) entries of `values` (at least one).
TailSummary tail_summary(std::span<const double> values, double fraction);

} // namespace apk
