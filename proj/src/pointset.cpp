#include "apk/pointset.hpp"

#include <atomic>
#include <limits>
#include <numbers>

namespace apk {

namespace {

constexpr double kBoundarySlack = 1e-12;

void require_same_dim(const PointSet& a, const PointSet& b) {
    if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, "point sets differ in dimension");
}

} // namespace

// ---------------------------------------------------------------- RegionSpec

RegionSpec RegionSpec::ball(Point center, double radius) {
    if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "ball radius must be positive");
    if (!center.finite()) throw Error(ErrorCode::InvalidArgument, "ball center must be finite");
    return RegionSpec(Ball{center, radius});
}

RegionSpec RegionSpec::box(Point lo, Point hi) {
    if (lo.dim() != hi.dim()) throw Error(ErrorCode::DimensionMismatch, "box corners differ in dimension");
    for (std::size_t i = 0; i < lo.dim(); ++i)
        if (!(lo[i] < hi[i])) throw Error(ErrorCode::InvalidArgument, "box requires lo < hi componentwise");
    return RegionSpec(Box{lo, hi});
}

std::size_t RegionSpec::dim() const noexcept {
    return is_ball() ? as_ball().center.dim() : as_box().lo.dim();
}

bool RegionSpec::contains(const Point& p) const noexcept {
    if (is_ball()) {
        const auto& b = as_ball();
        return distance2(p, b.center) <= b.radius * b.radius;
    }
    const auto& b = as_box();
    for (std::size_t i = 0; i < b.lo.dim(); ++i)
        if (p[i] < b.lo[i] || p[i] >= b.hi[i]) return false;
    return true;
}

double RegionSpec::max_norm() const noexcept {
    if (is_ball()) return as_ball().center.norm() + as_ball().radius;
    const auto& b = as_box();
    double s = 0.0;
    for (std::size_t i = 0; i < b.lo.dim(); ++i) {
        const double m = std::max(std::abs(b.lo[i]), std::abs(b.hi[i]));
        s += m * m;
    }
    return std::sqrt(s);
}

double RegionSpec::volume() const {
    if (is_ball()) return ball_volume(dim(), as_ball().radius);
    const auto& b = as_box();
    double v = 1.0;
    for (std::size_t i = 0; i < b.lo.dim(); ++i) v *= b.hi[i] - b.lo[i];
    return v;
}

double RegionSpec::diameter() const noexcept {
    if (is_ball()) return 2.0 * as_ball().radius;
    return distance(as_box().lo, as_box().hi);
}

// ------------------------------------------------------------------ PointSet

PointSet::PointSet(std::size_t dim, std::vector<Point> points, double window_radius, double hardcore_radius)
    : dim_(dim), points_(std::move(points)), window_(window_radius), hardcore_(hardcore_radius) {
    if (dim == 0 || dim > kMaxDim) throw Error(ErrorCode::InvalidArgument, "unsupported dimension");
    if (!(window_radius >= 0.0) || !std::isfinite(window_radius))
        throw Error(ErrorCode::InvalidArgument, "window radius must be finite and nonnegative");
    if (!(hardcore_radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "hardcore radius must be positive");
    const double w2 = window_ * window_ * (1.0 + kBoundarySlack);
    for (const auto& p : points_) {
        if (p.dim() != dim) throw Error(ErrorCode::DimensionMismatch, "point " + to_string(p) + " has wrong dimension");
        if (!p.finite()) throw Error(ErrorCode::InvalidArgument, "non-finite coordinate");
        if (p.norm2() > w2) throw Error(ErrorCode::OutsideWindow, "point " + to_string(p) + " outside window");
    }
    std::sort(points_.begin(), points_.end());
    if (std::adjacent_find(points_.begin(), points_.end()) != points_.end())
        throw Error(ErrorCode::InvalidArgument, "duplicate point");
    const double gap = min_pair_distance(points_);
    if (gap < hardcore_ * (1.0 - 1e-9))
        throw Error(ErrorCode::NotUniformlyDiscrete,
                    "minimum spacing " + std::to_string(gap) + " below hardcore radius " + std::to_string(hardcore_));
}

PointSet PointSet::trusted(std::size_t dim, std::vector<Point> points, double window_radius, double hardcore_radius) {
    PointSet s;
    s.dim_ = dim;
    s.points_ = std::move(points);
    s.window_ = window_radius;
    s.hardcore_ = hardcore_radius;
    return s;
}

const GridIndex& PointSet::index() const {
    auto idx = std::atomic_load(&index_);
    if (!idx) {
        idx = std::make_shared<const GridIndex>(points_, hardcore_);
        std::atomic_store(&index_, idx);
    }
    return *idx;
}

PointSet PointSet::restricted(double R) const {
    if (R > window_) throw Error(ErrorCode::RadiusExceedsWindow, "restriction radius exceeds window");
    std::vector<Point> kept;
    const double r2 = R * R;
    for (const auto& p : points_)
        if (p.norm2() <= r2) kept.push_back(p);
    return trusted(dim_, std::move(kept), R, hardcore_);
}

// ---------------------------------------------------------------- operations

std::size_t count_in_region(const PointSet& S, const RegionSpec& A) {
    if (A.dim() != S.dim()) throw Error(ErrorCode::DimensionMismatch, "region dimension differs from point set");
    if (A.max_norm() > S.window_radius() * (1.0 + kBoundarySlack))
        throw Error(ErrorCode::RegionOutsideWindow, "region reaches outside the faithful window");
    if (A.is_ball()) {
        std::size_t n = 0;
        S.index().for_each_within(A.as_ball().center, A.as_ball().radius, [&](std::size_t, double) { ++n; });
        return n;
    }
    return static_cast<std::size_t>(
        std::count_if(S.points().begin(), S.points().end(), [&](const Point& p) { return A.contains(p); }));
}

PointSet translate(const PointSet& S, const Point& t) {
    if (t.dim() != S.dim()) throw Error(ErrorCode::DimensionMismatch, "translation vector dimension");
    const double tn = t.norm();
    if (tn > S.window_radius())
        throw Error(ErrorCode::TranslationExceedsWindow, "|t| = " + std::to_string(tn) + " exceeds window");
    const double w = S.window_radius() - tn;
    const double w2 = w * w;
    std::vector<Point> moved;
    moved.reserve(S.size());
    for (const auto& p : S.points()) {
        Point q = p - t;
        if (q.norm2() <= w2) moved.push_back(q);
    }
    // translation preserves lexicographic order and spacing
    return PointSet::trusted(S.dim(), std::move(moved), w, S.hardcore_radius());
}

double metric_d(const PointSet& S, const PointSet& S2, double tol) {
    require_same_dim(S, S2);
    const double cap = 1.0 / std::numbers::sqrt2;
    if (!(tol > 0.0) || tol >= cap) throw Error(ErrorCode::InvalidArgument, "tol must lie in (0, 1/sqrt 2)");
    const double window = std::min(S.window_radius(), S2.window_radius());
    if (1.0 / tol + tol > window)
        throw Error(ErrorCode::WindowTooSmall, "metric_d needs window >= 1/tol + tol");

    // a belongs to D(S,S2) iff each set's points in B_{1/a} lie within a of the other set
    auto covered_in = [](const PointSet& from, const PointSet& to, double a, double radius) {
        const Point origin = Point::zero(from.dim());
        bool ok = true;
        from.index().for_each_within(origin, radius, [&](std::size_t i, double) {
            if (ok && !to.index().any_within(from[i], a)) ok = false;
        });
        return ok;
    };
    auto covered = [&](const PointSet& from, const PointSet& to, double a) { return covered_in(from, to, a, 1.0 / a); };
    auto in_D = [&](double a) { return covered(S, S2, a) && covered(S2, S, a); };

    // sets that coincide on the whole common window are indistinguishable at any resolution
    if (covered_in(S, S2, 1e-12, window) && covered_in(S2, S, 1e-12, window)) return 0.0;

    if (in_D(tol)) return tol;
    if (!in_D(cap)) return cap;
    double lo = tol, hi = cap;
    while (hi - lo > 0.5 * tol) {
        const double mid = 0.5 * (lo + hi);
        (in_D(mid) ? hi : lo) = mid;
    }
    return hi;
}

DensityEstimate upper_density(std::span<const Point> points, std::size_t dim, double window,
                              std::span<const double> radii, const DensityOptions& opts) {
    DensityEstimate est;
    if (radii.empty()) throw Error(ErrorCode::InvalidArgument, "empty radius schedule");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0.0)) throw Error(ErrorCode::InvalidArgument, "radii must be positive");
        if (i > 0 && !(radii[i] > radii[i - 1])) throw Error(ErrorCode::InvalidArgument, "radii must increase");
    }
    if (radii.back() > window * (1.0 + kBoundarySlack))
        throw Error(ErrorCode::RadiusExceedsWindow,
                    "radius " + std::to_string(radii.back()) + " exceeds window " + std::to_string(window));

    std::vector<double> norms;
    norms.reserve(points.size());
    for (const auto& p : points) norms.push_back(p.norm());
    std::sort(norms.begin(), norms.end());

    est.radii_used.assign(radii.begin(), radii.end());
    for (double R : radii) {
        const auto n = std::upper_bound(norms.begin(), norms.end(), R) - norms.begin();
        est.tail_values.push_back(static_cast<double>(n) / ball_volume(dim, R));
    }
    est.value = tail_summary(est.tail_values, opts.tail_fraction).max;
    est.converged = tail_summary(est.tail_values, 0.25).relative_spread < opts.converge_threshold;
    return est;
}

DensityEstimate upper_density(const PointSet& S, std::span<const double> radii, const DensityOptions& opts) {
    return upper_density(S.points(), S.dim(), S.window_radius(), radii, opts);
}

namespace {

double gap_1d(std::span<const Point> A, double sr) {
    std::vector<double> xs;
    for (const auto& p : A)
        if (std::abs(p[0]) <= sr) xs.push_back(p[0]);
    if (xs.empty()) throw Error(ErrorCode::EmptyCandidateSet, "no candidate inside the search ball");
    std::sort(xs.begin(), xs.end());
    auto dist_to_set = [&](double c) {
        const auto it = std::lower_bound(xs.begin(), xs.end(), c);
        double d = std::numeric_limits<double>::infinity();
        if (it != xs.end()) d = *it - c;
        if (it != xs.begin()) d = std::min(d, c - *std::prev(it));
        return d;
    };
    // worst-covered centre in [-(sr - M), sr - M]: an endpoint or a gap midpoint
    auto worst = [&](double M) {
        const double reach = sr - M;
        if (reach < 0.0) return 0.0;
        double h = std::max(dist_to_set(-reach), dist_to_set(reach));
        for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
            const double mid = 0.5 * (xs[i] + xs[i + 1]);
            if (std::abs(mid) <= reach) h = std::max(h, 0.5 * (xs[i + 1] - xs[i]));
        }
        return h;
    };
    double lo = 0.0, hi = sr;
    if (worst(0.0) <= 0.0) return 0.0;
    for (int it = 0; it < 80 && hi - lo > 1e-13 * std::max(1.0, sr); ++it) {
        const double mid = 0.5 * (lo + hi);
        (worst(mid) <= mid ? hi : lo) = mid;
    }
    return hi;
}

double gap_nd(std::span<const Point> A, double sr, double pitch) {
    const std::size_t dim = A.front().dim();
    std::vector<Point> inside;
    for (const auto& p : A)
        if (p.norm() <= sr) inside.push_back(p);
    if (inside.empty()) throw Error(ErrorCode::EmptyCandidateSet, "no candidate inside the search ball");
    const double cell = std::max(pitch, 2.0 * sr / std::pow(static_cast<double>(inside.size()), 1.0 / static_cast<double>(dim)));
    const GridIndex idx(inside, cell);

    const auto steps = static_cast<std::int64_t>(std::floor(sr / pitch));
    std::vector<std::pair<double, double>> probes; // (|c|, dist(c, A))
    std::array<std::int64_t, kMaxDim> k{};
    for (std::size_t a = 0; a < dim; ++a) k[a] = -steps;
    while (true) {
        Point c(dim);
        for (std::size_t a = 0; a < dim; ++a) c[a] = static_cast<double>(k[a]) * pitch;
        if (c.norm() <= sr) {
            const auto nn = idx.nearest(c, 2.0 * sr + cell);
            probes.emplace_back(c.norm(), nn ? nn->distance : 2.0 * sr);
        }
        std::size_t a = 0;
        while (a < dim) {
            if (++k[a] <= steps) break;
            k[a] = -steps;
            ++a;
        }
        if (a == dim) break;
    }
    std::sort(probes.begin(), probes.end());
    std::vector<double> prefix_max(probes.size());
    double running = 0.0;
    for (std::size_t i = 0; i < probes.size(); ++i) prefix_max[i] = running = std::max(running, probes[i].second);
    auto worst = [&](double M) {
        const double reach = sr - M;
        const auto n = std::upper_bound(probes.begin(), probes.end(), std::make_pair(reach, std::numeric_limits<double>::infinity())) -
                       probes.begin();
        return n == 0 ? 0.0 : prefix_max[static_cast<std::size_t>(n) - 1];
    };
    double lo = 0.0, hi = sr;
    if (worst(0.0) <= 0.0) return 0.0;
    for (int it = 0; it < 80 && hi - lo > 1e-13 * std::max(1.0, sr); ++it) {
        const double mid = 0.5 * (lo + hi);
        (worst(mid) <= mid ? hi : lo) = mid;
    }
    return hi;
}

} // namespace

double relative_density_gap(std::span<const Point> A, double search_radius, const GapOptions& opts) {
    if (!(search_radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "search radius must be positive");
    if (A.empty()) throw Error(ErrorCode::EmptyCandidateSet, "empty candidate set");
    if (A.front().dim() == 1) return gap_1d(A, search_radius);
    const double pitch = opts.probe_pitch > 0.0 ? opts.probe_pitch : search_radius / 100.0;
    return gap_nd(A, search_radius, pitch);
}

double min_pair_distance(std::span<const Point> points) {
    if (points.size() < 2) return std::numeric_limits<double>::infinity();
    const std::size_t dim = points.front().dim();
    if (dim == 1) {
        std::vector<double> xs;
        xs.reserve(points.size());
        for (const auto& p : points) xs.push_back(p[0]);
        std::sort(xs.begin(), xs.end());
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < xs.size(); ++i) best = std::min(best, xs[i] - xs[i - 1]);
        return best;
    }
    Point lo = points.front(), hi = points.front();
    for (const auto& p : points)
        for (std::size_t a = 0; a < dim; ++a) {
            lo[a] = std::min(lo[a], p[a]);
            hi[a] = std::max(hi[a], p[a]);
        }
    double vol = 1.0;
    for (std::size_t a = 0; a < dim; ++a) vol *= std::max(hi[a] - lo[a], 1e-12);
    const double cell = std::pow(vol / static_cast<double>(points.size()), 1.0 / static_cast<double>(dim));
    const GridIndex idx(points, cell > 0.0 ? cell : 1.0);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto nn = idx.nearest(points[i], std::numeric_limits<double>::infinity(), i);
        if (nn) best = std::min(best, nn->distance);
    }
    return best;
}

double mean_nn_spacing(const PointSet& S) {
    if (S.size() < 2) return std::numeric_limits<double>::infinity();
    const auto& idx = S.index();
    std::vector<double> d;
    d.reserve(S.size());
    for (std::size_t i = 0; i < S.size(); ++i) {
        const auto nn = idx.nearest(S[i], std::numeric_limits<double>::infinity(), i);
        d.push_back(nn->distance);
    }
    return pairwise_sum(d) / static_cast<double>(d.size());
}

bool verify_uniform_discreteness(const PointSet& S, double r) {
    return min_pair_distance(S.points()) >= r * (1.0 - 1e-9);
}

} // namespace apk
