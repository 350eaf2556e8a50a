#pragma once

#include "apk/core.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace apk {

/// Uniform-grid spatial index over a fixed point list.
///
/// The cell size is normally the hardcore radius r of the indexed set, so a
/// cell holds a bounded number of points and radius queries cost O(1) per
/// visited cell. One-dimensional inputs use a sorted array instead of cells.
/// Indices reported by queries refer to positions in the input span.
class GridIndex {
public:
    struct Neighbor {
        std::size_t index;
        double distance;
    };

    GridIndex() = default;
    GridIndex(std::span<const Point> points, double cell_size);

    std::size_t size() const noexcept { return points_.size(); }
    std::size_t dim() const noexcept { return dim_; }
    const Point& point(std::size_t i) const noexcept { return points_[i]; }

    /// Calls fn(index, squared_distance) for every point in the closed ball.
    template <typename Fn>
    void for_each_within(const Point& center, double radius, Fn&& fn) const;

    /// Nearest point within the closed ball of radius max_radius, optionally
    /// skipping one index.
    std::optional<Neighbor> nearest(const Point& center, double max_radius,
                                    std::optional<std::size_t> exclude = std::nullopt) const;

    bool any_within(const Point& center, double radius) const;

private:
    using Key = std::array<std::int64_t, kMaxDim>;
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept {
            std::uint64_t h = 0x9e3779b97f4a7c15ULL;
            for (auto v : k) {
                h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
            }
            return static_cast<std::size_t>(h);
        }
    };
    struct Range {
        std::uint32_t begin, end;
    };

    Key key_of(const Point& p) const noexcept;
    template <typename Fn>
    void visit_box(const Key& lo, const Key& hi, Fn&& fn) const;

    std::vector<Point> points_;
    std::size_t dim_ = 0;
    double cell_ = 1.0;
    // dim == 1
    std::vector<double> sorted_x_;
    std::vector<std::uint32_t> order_;
    // dim > 1
    std::unordered_map<Key, Range, KeyHash> cells_;
    std::vector<std::uint32_t> slots_;
};

template <typename Fn>
void GridIndex::visit_box(const Key& lo, const Key& hi, Fn&& fn) const {
    Key k = lo;
    while (true) {
        if (auto it = cells_.find(k); it != cells_.end()) {
            for (auto s = it->second.begin; s < it->second.end; ++s) fn(slots_[s]);
        }
        std::size_t axis = 0;
        while (axis < dim_) {
            if (++k[axis] <= hi[axis]) break;
            k[axis] = lo[axis];
            ++axis;
        }
        if (axis == dim_) return;
    }
}

template <typename Fn>
void GridIndex::for_each_within(const Point& center, double radius, Fn&& fn) const {
    if (points_.empty() || radius < 0.0) return;
    const double r2 = radius * radius;
    if (dim_ == 1) {
        auto first = std::lower_bound(sorted_x_.begin(), sorted_x_.end(), center[0] - radius);
        for (auto it = first; it != sorted_x_.end() && *it <= center[0] + radius; ++it) {
            const auto slot = static_cast<std::size_t>(it - sorted_x_.begin());
            const double d = *it - center[0];
            if (d * d <= r2) fn(static_cast<std::size_t>(order_[slot]), d * d);
        }
        return;
    }
    Key lo{}, hi{};
    double cells_visited = 1.0;
    for (std::size_t a = 0; a < dim_; ++a) {
        lo[a] = static_cast<std::int64_t>(std::floor((center[a] - radius) / cell_));
        hi[a] = static_cast<std::int64_t>(std::floor((center[a] + radius) / cell_));
        cells_visited *= static_cast<double>(hi[a] - lo[a] + 1);
    }
    if (cells_visited > static_cast<double>(points_.size())) {
        for (std::size_t i = 0; i < points_.size(); ++i) {
            const double d2 = distance2(points_[i], center);
            if (d2 <= r2) fn(i, d2);
        }
        return;
    }
    visit_box(lo, hi, [&](std::uint32_t i) {
        const double d2 = distance2(points_[i], center);
        if (d2 <= r2) fn(static_cast<std::size_t>(i), d2);
    });
}

} // namespace apk
