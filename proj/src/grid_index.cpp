#include "apk/grid_index.hpp"

#include <numeric>

namespace apk {

GridIndex::GridIndex(std::span<const Point> points, double cell_size)
    : points_(points.begin(), points.end()), cell_(cell_size) {
    if (!(cell_size > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid cell size must be positive");
    if (points_.size() >= std::numeric_limits<std::uint32_t>::max())
        throw Error(ErrorCode::InvalidArgument, "too many points for GridIndex");
    if (points_.empty()) return;
    dim_ = points_.front().dim();

    if (dim_ == 1) {
        order_.resize(points_.size());
        std::iota(order_.begin(), order_.end(), 0U);
        std::stable_sort(order_.begin(), order_.end(),
                         [&](std::uint32_t a, std::uint32_t b) { return points_[a][0] < points_[b][0]; });
        sorted_x_.reserve(points_.size());
        for (auto i : order_) sorted_x_.push_back(points_[i][0]);
        return;
    }

    std::vector<std::pair<Key, std::uint32_t>> keyed;
    keyed.reserve(points_.size());
    for (std::uint32_t i = 0; i < points_.size(); ++i) keyed.emplace_back(key_of(points_[i]), i);
    std::sort(keyed.begin(), keyed.end());
    slots_.reserve(keyed.size());
    for (std::size_t s = 0; s < keyed.size(); ++s) {
        slots_.push_back(keyed[s].second);
        auto [it, inserted] = cells_.try_emplace(keyed[s].first, Range{static_cast<std::uint32_t>(s), 0});
        it->second.end = static_cast<std::uint32_t>(s + 1);
    }
}

GridIndex::Key GridIndex::key_of(const Point& p) const noexcept {
    Key k{};
    for (std::size_t a = 0; a < dim_; ++a) k[a] = static_cast<std::int64_t>(std::floor(p[a] / cell_));
    return k;
}

std::optional<GridIndex::Neighbor> GridIndex::nearest(const Point& center, double max_radius,
                                                      std::optional<std::size_t> exclude) const {
    if (points_.empty()) return std::nullopt;
    std::optional<Neighbor> best;
    auto consider = [&](std::size_t i, double d2) {
        if (exclude && *exclude == i) return;
        const double d = std::sqrt(d2);
        if (d <= max_radius && (!best || d < best->distance || (d == best->distance && i < best->index)))
            best = Neighbor{i, d};
    };

    if (dim_ == 1) {
        const auto pos = std::lower_bound(sorted_x_.begin(), sorted_x_.end(), center[0]) - sorted_x_.begin();
        // scan right
        for (auto s = pos; s < static_cast<std::ptrdiff_t>(sorted_x_.size()); ++s) {
            const double d = sorted_x_[s] - center[0];
            if (d > max_radius || (best && d > best->distance)) break;
            consider(order_[s], d * d);
        }
        for (auto s = pos - 1; s >= 0; --s) {
            const double d = center[0] - sorted_x_[s];
            if (d > max_radius || (best && d > best->distance)) break;
            consider(order_[s], d * d);
        }
        return best;
    }

    // Expanding shells of cells; shell k holds cells at Chebyshev distance k
    // from the center cell, all of which are at least (k - 1) * cell_ away.
    const Key c = key_of(center);
    const auto max_shell = static_cast<std::int64_t>(std::ceil(max_radius / cell_)) + 1;
    const double brute_cost = static_cast<double>(points_.size());
    for (std::int64_t k = 0; k <= max_shell; ++k) {
        if (best && static_cast<double>(k - 1) * cell_ > best->distance) break;
        if (std::pow(2.0 * static_cast<double>(k) + 1.0, static_cast<double>(dim_)) > brute_cost) {
            for (std::size_t i = 0; i < points_.size(); ++i) consider(i, distance2(points_[i], center));
            return best;
        }
        Key lo{}, hi{};
        for (std::size_t a = 0; a < dim_; ++a) {
            lo[a] = c[a] - k;
            hi[a] = c[a] + k;
        }
        visit_box(lo, hi, [&](std::uint32_t i) {
            const Key ki = key_of(points_[i]);
            std::int64_t cheb = 0;
            for (std::size_t a = 0; a < dim_; ++a) cheb = std::max(cheb, std::abs(ki[a] - c[a]));
            if (cheb == k) consider(i, distance2(points_[i], center));
        });
    }
    return best;
}

bool GridIndex::any_within(const Point& center, double radius) const {
    return nearest(center, radius).has_value();
}

} // namespace apk
