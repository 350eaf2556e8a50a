#include "apk/pseudometrics.hpp"
#include "apk/parallel.hpp"
#include "apk/quadrature.hpp"

#include <limits>
#include <numbers>

namespace apk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSamePointTol = 1e-12;

void require_compatible(const PointSet& a, const PointSet& b) {
    if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, "point sets differ in dimension");
    const double ra = a.hardcore_radius(), rb = b.hardcore_radius();
    if (std::abs(ra - rb) > 1e-12 * std::max(ra, rb))
        throw Error(ErrorCode::HardcoreMismatch, "point sets declare different hardcore radii");
}

/// Distance from each point of `from` with |x| <= reach to the nearest point
/// of `to`, or infinity when none lies within `cap`.
struct CappedNN {
    std::vector<Point> points;
    std::vector<double> nn;
};

void append_capped_nn(CappedNN& out, const PointSet& from, const PointSet& to, double reach, double cap) {
    from.index().for_each_within(Point::zero(from.dim()), reach, [&](std::size_t i, double) {
        const auto hit = to.index().nearest(from[i], cap);
        out.points.push_back(from[i]);
        out.nn.push_back(hit ? hit->distance : kInf);
    });
}

} // namespace

PointSet asymmetric_mismatch(const PointSet& S, const PointSet& S2, double a) {
    if (S.dim() != S2.dim()) throw Error(ErrorCode::DimensionMismatch, "point sets differ in dimension");
    if (!(a > 0.0)) throw Error(ErrorCode::InvalidArgument, "mismatch scale must be positive");
    const double window = std::min(S.window_radius(), S2.window_radius()) - a;
    if (window < 0.0) throw Error(ErrorCode::WindowTooSmall, "mismatch scale exceeds window");
    std::vector<Point> kept;
    S.index().for_each_within(Point::zero(S.dim()), window, [&](std::size_t i, double) {
        if (!S2.index().any_within(S[i], a)) kept.push_back(S[i]);
    });
    std::sort(kept.begin(), kept.end());
    return PointSet::trusted(S.dim(), std::move(kept), window, S.hardcore_radius());
}

WindowedPoints mismatch(const PointSet& S, const PointSet& S2, double a) {
    const PointSet left = asymmetric_mismatch(S, S2, a);
    const PointSet right = asymmetric_mismatch(S2, S, a);
    WindowedPoints out{S.dim(), {}, left.window_radius()};
    out.points.assign(left.points().begin(), left.points().end());
    out.points.insert(out.points.end(), right.points().begin(), right.points().end());
    std::sort(out.points.begin(), out.points.end());
    return out;
}

double dbar(const PointSet& S, const PointSet& S2, std::span<const double> radii, double tol) {
    require_compatible(S, S2);
    if (radii.empty()) throw Error(ErrorCode::InvalidArgument, "empty radius schedule");
    const double cap = S.hardcore_radius() / 2.0;
    if (!(tol > 0.0) || tol >= cap) throw Error(ErrorCode::InvalidArgument, "tol must lie in (0, r/2)");
    const double window = std::min(S.window_radius(), S2.window_radius());
    if (radii.back() + cap > window)
        throw Error(ErrorCode::RadiusExceedsWindow, "largest radius plus r/2 exceeds the common window");

    // Delta_a = {x : nn(x) > a}; nn is only needed up to the cap.
    CappedNN table;
    append_capped_nn(table, S, S2, radii.back(), cap);
    append_capped_nn(table, S2, S, radii.back(), cap);

    auto in_Dbar = [&](double a) {
        std::vector<Point> delta;
        for (std::size_t i = 0; i < table.points.size(); ++i)
            if (table.nn[i] > a) delta.push_back(table.points[i]);
        return upper_density(delta, S.dim(), window - a, radii).value <= a;
    };

    if (in_Dbar(tol)) {
        // mismatches of density zero at every scale give an infimum of exactly 0
        std::vector<Point> delta;
        for (std::size_t i = 0; i < table.points.size(); ++i)
            if (table.nn[i] > 1e-12) delta.push_back(table.points[i]);
        return upper_density(delta, S.dim(), window, radii).value == 0.0 ? 0.0 : tol;
    }
    if (!in_Dbar(cap)) return cap;
    double lo = tol, hi = cap;
    while (hi - lo > 0.5 * tol) {
        const double mid = 0.5 * (lo + hi);
        (in_Dbar(mid) ? hi : lo) = mid;
    }
    return hi;
}

PseudoMetricReport dbar_c(const PointSet& S, const PointSet& S2, double R, std::size_t quad_points, double tol,
                          std::size_t n_radii, const PseudoMetricOptions& opts) {
    if (S.dim() != S2.dim()) throw Error(ErrorCode::DimensionMismatch, "point sets differ in dimension");
    const double cap = 1.0 / std::numbers::sqrt2;
    if (!(tol > 0.0) || tol >= cap) throw Error(ErrorCode::InvalidArgument, "tol must lie in (0, 1/sqrt 2)");
    if (!(R > 0.0) || n_radii == 0) throw Error(ErrorCode::InvalidArgument, "dbar_c needs R > 0 and radii");
    const double window = std::min(S.window_radius(), S2.window_radius());
    if (R + 1.0 / tol + tol > window)
        throw Error(ErrorCode::WindowTooSmall, "dbar_c needs window >= R + 1/tol + tol");

    // sets coinciding on the common window have every translate at distance 0, as in metric_d
    auto coincide = [&](const PointSet& from, const PointSet& to) {
        bool ok = true;
        from.index().for_each_within(Point::zero(from.dim()), window, [&](std::size_t i, double) {
            if (ok && !to.index().any_within(from[i], 1e-12)) ok = false;
        });
        return ok;
    };
    const bool identical = coincide(S, S2) && coincide(S2, S);

    CappedNN table;
    append_capped_nn(table, S, S2, R + 1.0 / tol, cap);
    append_capped_nn(table, S2, S, R + 1.0 / tol, cap);
    const GridIndex idx(table.points, std::max(S.hardcore_radius(), 1.0 / tol / 8.0));

    // d(S - t, S2 - t) only depends on the points near t and their nn values
    auto d_at = [&](const Point& t) {
        if (identical) return 0.0;
        std::vector<std::pair<double, double>> local; // (|x - t|, nn)
        idx.for_each_within(t, 1.0 / tol, [&](std::size_t i, double d2) { local.emplace_back(std::sqrt(d2), table.nn[i]); });
        auto in_D = [&](double a) {
            for (const auto& [dist, nn] : local)
                if (dist <= 1.0 / a && nn > a) return false;
            return true;
        };
        if (in_D(tol)) return tol;
        if (!in_D(cap)) return cap;
        double lo = tol, hi = cap;
        while (hi - lo > 0.5 * tol) {
            const double mid = 0.5 * (lo + hi);
            (in_D(mid) ? hi : lo) = mid;
        }
        return hi;
    };

    const auto nodes = midpoint_nodes(S.dim(), R, quad_points);
    std::vector<double> values(nodes.size());
    parallel_for(nodes.size(), [&](std::size_t i) { values[i] = d_at(nodes[i]); });

    PseudoMetricReport rep;
    rep.pitch = midpoint_pitch(R, quad_points);
    for (std::size_t k = 1; k <= n_radii; ++k) {
        const double Rk = R * static_cast<double>(k) / static_cast<double>(n_radii);
        std::vector<double> inside;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i].norm() <= Rk) inside.push_back(values[i]);
        rep.radii.push_back(Rk);
        rep.per_radius.push_back(inside.empty() ? 0.0 : pairwise_sum(inside) / static_cast<double>(inside.size()));
    }
    rep.value = tail_summary(rep.per_radius, opts.tail_fraction).max;
    rep.converged = tail_summary(rep.per_radius, 0.25).relative_spread < opts.converge_threshold;
    return rep;
}

double mu_conv_f(const PointSet& S, const TestFunction& f, const Point& u) {
    if (u.dim() != S.dim()) throw Error(ErrorCode::DimensionMismatch, "evaluation point dimension");
    const double reach = f.center.dim() ? f.center.norm() + f.support_radius : f.support_radius;
    if (u.norm() + reach > S.window_radius() * (1.0 + 1e-12))
        throw Error(ErrorCode::OutsideWindow, "u + supp f leaves the faithful window");
    // f(u - x) != 0 only for x within support_radius of u - center
    const Point probe = f.center.dim() ? u - f.center : u;
    std::vector<double> terms;
    S.index().for_each_within(probe, f.support_radius, [&](std::size_t i, double) { terms.push_back(f(u - S[i])); });
    return pairwise_sum(terms);
}

PseudoMetricReport dbar_f(const PointSet& S, const PointSet& S2, const TestFunction& f,
                          std::span<const double> radii, std::size_t quad_points, const PseudoMetricOptions& opts) {
    require_compatible(S, S2);
    if (radii.empty() || quad_points == 0) throw Error(ErrorCode::InvalidArgument, "dbar_f needs radii and nodes");
    if (f.support_radius > S.hardcore_radius() / 5.0 * (1.0 + 1e-12))
        throw Error(ErrorCode::SupportTooLarge, "test function support must lie in B_{r/5}");
    const double R = radii.back();
    const auto nodes = midpoint_nodes(S.dim(), R, quad_points);
    std::vector<double> values(nodes.size());
    parallel_for(nodes.size(), [&](std::size_t i) {
        values[i] = std::abs(mu_conv_f(S, f, nodes[i]) - mu_conv_f(S2, f, nodes[i]));
    });

    PseudoMetricReport rep;
    rep.pitch = midpoint_pitch(R, quad_points);
    for (double Rk : radii) {
        std::vector<double> inside;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i].norm() <= Rk) inside.push_back(values[i]);
        rep.radii.push_back(Rk);
        rep.per_radius.push_back(inside.empty() ? 0.0 : pairwise_sum(inside) / static_cast<double>(inside.size()));
    }
    rep.value = tail_summary(rep.per_radius, opts.tail_fraction).max;
    rep.converged = tail_summary(rep.per_radius, 0.25).relative_spread < opts.converge_threshold;
    return rep;
}

double dtilde(const PointSet& S, const PointSet& S2, std::span<const double> radii) {
    if (S.dim() != S2.dim()) throw Error(ErrorCode::DimensionMismatch, "point sets differ in dimension");
    const double window = std::min(S.window_radius(), S2.window_radius());
    std::vector<Point> diff;
    auto collect = [&](const PointSet& from, const PointSet& to) {
        from.index().for_each_within(Point::zero(from.dim()), window, [&](std::size_t i, double) {
            if (!to.index().any_within(from[i], kSamePointTol)) diff.push_back(from[i]);
        });
    };
    collect(S, S2);
    collect(S2, S);
    return upper_density(diff, S.dim(), window, radii).value;
}

} // namespace apk
