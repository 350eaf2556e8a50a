#pragma once

#include "apk/generators.hpp"
#include "apk/pointset.hpp"
#include "apk/rng.hpp"

#include <cmath>
#include <vector>

namespace apk::testing {

/// Z - shift restricted to the closed ball of radius `window`.
inline PointSet integers(double window, double shift = 0.0, double step = 1.0) {
    std::vector<Point> pts;
    const auto lo = static_cast<long>(std::floor((-window + shift) / step)) - 1;
    const auto hi = static_cast<long>(std::ceil((window + shift) / step)) + 1;
    for (long m = lo; m <= hi; ++m) {
        const double x = static_cast<double>(m) * step - shift;
        if (std::abs(x) <= window) pts.push_back(Point{x});
    }
    return PointSet(1, std::move(pts), window, step);
}

/// Integers with the points listed in `drop` removed.
inline PointSet integers_without(double window, std::vector<double> drop) {
    std::vector<Point> pts;
    const PointSet Z = integers(window);
    for (const auto& p : Z.points()) {
        bool keep = true;
        for (double d : drop) keep = keep && p[0] != d;
        if (keep) pts.push_back(p);
    }
    return PointSet(1, std::move(pts), window, 1.0);
}

/// Random uniformly discrete set: a lattice of pitch `pitch` with every point
/// moved by at most `jitter` (< pitch / 2) in each coordinate. Hardcore radius
/// pitch - 2 * jitter * sqrt(dim).
inline PointSet jittered_lattice(CounterRng& rng, std::size_t dim, double window, double pitch, double jitter) {
    std::vector<Point> pts;
    const auto n = static_cast<long>(std::ceil(window / pitch)) + 1;
    std::array<long, kMaxDim> j{};
    for (std::size_t a = 0; a < dim; ++a) j[a] = -n;
    while (true) {
        Point p(dim);
        for (std::size_t a = 0; a < dim; ++a) p[a] = static_cast<double>(j[a]) * pitch + rng.uniform(-jitter, jitter);
        if (p.norm() <= window) pts.push_back(p);
        std::size_t a = 0;
        while (a < dim && ++j[a] > n) j[a++] = -n;
        if (a == dim) break;
    }
    const double r = pitch - 2.0 * jitter * std::sqrt(static_cast<double>(dim));
    return PointSet(dim, std::move(pts), window, r);
}

inline bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

} // namespace apk::testing
