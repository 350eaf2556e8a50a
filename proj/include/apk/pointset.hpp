#pragma once

#include "apk/core.hpp"
#include "apk/grid_index.hpp"
#include "apk/numeric.hpp"

#include <memory>
#include <span>
#include <variant>
#include <vector>

namespace apk {

/// Closed Euclidean ball.
struct Ball {
    Point center;
    double radius = 0.0;
};

/// Half-open box [lo, hi).
struct Box {
    Point lo;
    Point hi;
};

/// Bounded region used for counting (ball or box).
class RegionSpec {
public:
    /// Degenerate zero-dimensional ball; only useful as a placeholder.
    RegionSpec() = default;
    static RegionSpec ball(Point center, double radius);
    static RegionSpec box(Point lo, Point hi);

    std::size_t dim() const noexcept;
    bool contains(const Point& p) const noexcept;
    /// sup |x| over the region.
    double max_norm() const noexcept;
    double volume() const;
    double diameter() const noexcept;

    bool is_ball() const noexcept { return std::holds_alternative<Ball>(shape_); }
    const Ball& as_ball() const { return std::get<Ball>(shape_); }
    const Box& as_box() const { return std::get<Box>(shape_); }

private:
    explicit RegionSpec(std::variant<Ball, Box> s) : shape_(std::move(s)) {}
    std::variant<Ball, Box> shape_{};
};

/// Finite window of a uniformly discrete set.
///
/// Contract: every point of the underlying infinite set lying in the closed
/// ball B_{window_radius} is present, and no other point is. Points are kept
/// sorted lexicographically and are pairwise at least hardcore_radius apart.
class PointSet {
public:
    PointSet(std::size_t dim, std::vector<Point> points, double window_radius, double hardcore_radius);

    /// Skips sorting and spacing validation; the caller guarantees both.
    static PointSet trusted(std::size_t dim, std::vector<Point> points, double window_radius,
                            double hardcore_radius);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return points_.size(); }
    bool empty() const noexcept { return points_.empty(); }
    double window_radius() const noexcept { return window_; }
    double hardcore_radius() const noexcept { return hardcore_; }
    std::span<const Point> points() const noexcept { return points_; }
    const Point& operator[](std::size_t i) const noexcept { return points_[i]; }

    /// Lazily built grid index with cell size equal to the hardcore radius.
    const GridIndex& index() const;

    /// Points inside the closed ball B_R, with the window shrunk to R.
    PointSet restricted(double R) const;

    friend bool operator==(const PointSet& a, const PointSet& b) noexcept {
        return a.dim_ == b.dim_ && a.window_ == b.window_ && a.hardcore_ == b.hardcore_ &&
               a.points_ == b.points_;
    }

private:
    PointSet() = default;

    std::size_t dim_ = 0;
    std::vector<Point> points_;
    double window_ = 0.0;
    double hardcore_ = 0.0;
    mutable std::shared_ptr<const GridIndex> index_;
};

/// Limsup surrogate for the upper density.
struct DensityEstimate {
    double value = 0.0;
    std::vector<double> radii_used;
    std::vector<double> tail_values;
    bool converged = false;
};

struct DensityOptions {
    /// Fraction of the schedule (from the top) over which the max is taken.
    double tail_fraction = 0.5;
    /// Relative spread of the last quarter below which the estimate is flagged converged.
    double converge_threshold = 0.05;
};

std::size_t count_in_region(const PointSet& S, const RegionSpec& A);

/// T_t(S) = S - t, restricted to the shrunken faithful window B_{W - |t|}.
PointSet translate(const PointSet& S, const Point& t);

/// Solomyak-type metric on locally finite sets, computed by bisection to within tol.
/// A return value equal to tol means "at most tol"; sets that coincide on the
/// common window give 0.
double metric_d(const PointSet& S, const PointSet& S2, double tol);

DensityEstimate upper_density(const PointSet& S, std::span<const double> radii, const DensityOptions& opts = {});

/// Same estimate for a raw point list known to be faithful inside B_window.
DensityEstimate upper_density(std::span<const Point> points, std::size_t dim, double window,
                              std::span<const double> radii, const DensityOptions& opts = {});

struct GapOptions {
    /// Probe grid pitch for dim >= 2; 0 picks search_radius / 100.
    double probe_pitch = 0.0;
};

/// Smallest M such that every ball of radius M centred in B_{search_radius - M}
/// meets A. Exact in one dimension; a probe-grid lower bound otherwise.
double relative_density_gap(std::span<const Point> A, double search_radius, const GapOptions& opts = {});

/// Smallest pairwise distance (infinity for fewer than two points).
double min_pair_distance(std::span<const Point> points);

/// Mean distance from a point to its nearest neighbour.
double mean_nn_spacing(const PointSet& S);

bool verify_uniform_discreteness(const PointSet& S, double r);

} // namespace apk
