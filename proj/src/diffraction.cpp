#include "apk/diffraction.hpp"
#include "apk/parallel.hpp"
#include "apk/pseudometrics.hpp"

#include <limits>
#include <map>
#include <numbers>

namespace apk {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_window(const PointSet& S, double R) {
    if (!(R > 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be positive");
    if (R > S.window_radius() * (1.0 + 1e-12)) throw Error(ErrorCode::RadiusExceedsWindow, "R exceeds window");
}

double fourier_power(const PointSet& S, double R, const Point& k) { return std::norm(fourier_sum(S, R, k)); }

double gamma_zero(const WeightedAtomMeasure& gamma) {
    const double g0 = gamma.empty() ? 0.0 : gamma.mass_at(Point::zero(gamma.dim()));
    if (!(g0 > 0.0)) throw Error(ErrorCode::NoAtomAtZero, "autocorrelation has no atom at the origin");
    return g0;
}

double spacing_from_gamma(const WeightedAtomMeasure& gamma, double g0) {
    return std::pow(g0, -1.0 / static_cast<double>(gamma.dim()));
}

CriterionReport finish(CriterionId id, double eps, std::vector<Point> accepted, std::size_t tested,
                       double default_bound, const CriterionOptions& opts) {
    CriterionReport rep;
    rep.criterion_id = id;
    rep.epsilon = eps;
    rep.candidates_tested = tested;
    std::sort(accepted.begin(), accepted.end());
    rep.almost_period_set = std::move(accepted);
    rep.gap_bound = opts.gap_bound > 0.0 ? opts.gap_bound : default_bound;
    try {
        rep.gap = relative_density_gap(rep.almost_period_set, opts.search_radius, opts.gap);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::EmptyCandidateSet) throw;
        rep.gap = std::numeric_limits<double>::infinity();
    }
    rep.verdict = rep.gap <= rep.gap_bound ? Verdict::pass : Verdict::fail;
    return rep;
}

void require_candidates_dim(std::span<const Point> candidates, std::size_t dim) {
    for (const auto& t : candidates)
        if (t.dim() != dim) throw Error(ErrorCode::DimensionMismatch, "candidate dimension");
}

} // namespace

std::string_view to_string(Normalization n) { return n == Normalization::per_volume ? "per-volume" : "atom-mass"; }

std::string_view to_string(CriterionId id) {
    switch (id) {
    case CriterionId::C3_gamma_concentration: return "C3_gamma_concentration";
    case CriterionId::C5_almost_periods: return "C5_almost_periods";
    case CriterionId::ATOM_concentration: return "ATOM_concentration";
    case CriterionId::BOHR_mu_conv_f: return "BOHR_mu_conv_f";
    }
    return "?";
}

std::string_view to_string(Verdict v) {
    switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

// --------------------------------------------------------------------- KGrid

std::vector<std::size_t> KGrid::shape() const {
    if (lo.dim() == 0 || hi.dim() != lo.dim() || step.dim() != lo.dim())
        throw Error(ErrorCode::DimensionMismatch, "k-grid corners and step must share a dimension");
    std::vector<std::size_t> s;
    for (std::size_t a = 0; a < lo.dim(); ++a) {
        if (!(step[a] > 0.0) || !(hi[a] >= lo[a])) throw Error(ErrorCode::InvalidArgument, "invalid k-grid axis");
        s.push_back(static_cast<std::size_t>(std::floor((hi[a] - lo[a]) / step[a] + 1e-9)) + 1);
    }
    return s;
}

std::vector<Point> KGrid::nodes() const {
    const auto s = shape();
    std::vector<Point> out;
    std::array<std::size_t, kMaxDim> j{};
    while (true) {
        Point k(lo.dim());
        for (std::size_t a = 0; a < lo.dim(); ++a) k[a] = lo[a] + static_cast<double>(j[a]) * step[a];
        out.push_back(k);
        std::size_t a = 0;
        while (a < lo.dim()) {
            if (++j[a] < s[a]) break;
            j[a] = 0;
            ++a;
        }
        if (a == lo.dim()) break;
    }
    return out;
}

// ------------------------------------------------------------------ spectra

std::complex<double> fourier_sum(const PointSet& S, double R, const Point& k) {
    require_window(S, R);
    if (k.dim() != S.dim()) throw Error(ErrorCode::DimensionMismatch, "wave vector dimension");
    std::vector<std::complex<double>> terms;
    S.index().for_each_within(Point::zero(S.dim()), R, [&](std::size_t i, double) {
        double kx = 0.0;
        for (std::size_t a = 0; a < k.dim(); ++a) kx += k[a] * S[i][a];
        // reduce the phase before scaling so large |k.x| keeps full accuracy
        const double frac = kx - std::round(kx);
        terms.push_back(std::polar(1.0, -kTwoPi * frac));
    });
    return pairwise_sum(std::span<const std::complex<double>>(terms));
}

Periodogram periodogram(const PointSet& S, double R, const KGrid& grid, Normalization norm) {
    require_window(S, R);
    if (grid.dim() != S.dim()) throw Error(ErrorCode::DimensionMismatch, "k-grid dimension");
    Periodogram pg;
    pg.dim = S.dim();
    pg.grid = grid;
    pg.k = grid.nodes();
    pg.radius_used = R;
    pg.normalization = norm;
    for (std::size_t a = 0; a < grid.dim(); ++a)
        if (grid.step[a] > 1.0 / (4.0 * R)) pg.resolution_warning = true;
    const double vol = ball_volume(S.dim(), R);
    const double scale = norm == Normalization::per_volume ? 1.0 / vol : 1.0 / (vol * vol);
    pg.values.resize(pg.k.size());
    parallel_for(pg.k.size(), [&](std::size_t i) { pg.values[i] = fourier_power(S, R, pg.k[i]) * scale; });
    return pg;
}

AtomMassEstimate atom_mass(const PointSet& S, const Point& k, std::span<const double> radii, double tail_fraction) {
    if (radii.empty()) throw Error(ErrorCode::InvalidArgument, "empty radius schedule");
    AtomMassEstimate est;
    for (double R : radii) {
        const double vol = ball_volume(S.dim(), R);
        est.per_radius.push_back(fourier_power(S, R, k) / (vol * vol));
    }
    const auto tail = tail_summary(est.per_radius, tail_fraction);
    est.mass = tail.mean;
    est.stability = tail.relative_spread;
    return est;
}

double default_bragg_threshold(const PointSet& S, std::span<const double> radii, double factor) {
    if (radii.empty()) throw Error(ErrorCode::InvalidArgument, "empty radius schedule");
    const double R = radii.back();
    require_window(S, R);
    const double rho = static_cast<double>(count_in_region(S, RegionSpec::ball(Point::zero(S.dim()), R))) /
                       ball_volume(S.dim(), R);
    return factor * rho * rho;
}

std::vector<BraggPeak> detect_bragg_peaks(const PointSet& S, std::span<const double> radii, const KGrid& grid,
                                          double theta, double stability_bound) {
    if (radii.empty()) throw Error(ErrorCode::InvalidArgument, "empty radius schedule");
    if (!(theta > 0.0)) throw Error(ErrorCode::InvalidArgument, "detection threshold must be positive");
    if (S.empty()) return {};
    const double R = radii.back();
    const Periodogram pg = periodogram(S, R, grid, Normalization::per_volume);
    const double level = theta * ball_volume(S.dim(), R);
    const auto shape = grid.shape();
    const std::size_t dim = grid.dim();

    std::vector<std::size_t> stride(dim, 1);
    for (std::size_t a = 1; a < dim; ++a) stride[a] = stride[a - 1] * shape[a - 1];

    auto is_local_max = [&](std::size_t i) {
        std::array<std::size_t, kMaxDim> j{};
        for (std::size_t a = 0, rest = i; a < dim; ++a) {
            j[a] = rest % shape[a];
            rest /= shape[a];
        }
        std::array<int, kMaxDim> off{};
        for (std::size_t a = 0; a < dim; ++a) off[a] = -1;
        while (true) {
            bool centre = true, inside = true;
            std::size_t n = 0;
            for (std::size_t a = 0; a < dim; ++a) {
                if (off[a] != 0) centre = false;
                const auto q = static_cast<std::int64_t>(j[a]) + off[a];
                if (q < 0 || q >= static_cast<std::int64_t>(shape[a])) inside = false;
                else n += static_cast<std::size_t>(q) * stride[a];
            }
            if (!centre && inside && pg.values[n] > pg.values[i]) return false;
            std::size_t a = 0;
            while (a < dim) {
                if (++off[a] <= 1) break;
                off[a] = -1;
                ++a;
            }
            if (a == dim) return true;
        }
    };

    std::vector<std::size_t> maxima;
    for (std::size_t i = 0; i < pg.values.size(); ++i)
        if (pg.values[i] > level && is_local_max(i)) maxima.push_back(i);

    std::vector<std::optional<BraggPeak>> refined(maxima.size());
    parallel_for(maxima.size(), [&](std::size_t m) {
        Point k = pg.k[maxima[m]];
        // coordinate-wise golden-section search inside one grid step
        constexpr double kInvPhi = 0.6180339887498949;
        for (std::size_t a = 0; a < dim; ++a) {
            double lo = k[a] - grid.step[a], hi = k[a] + grid.step[a];
            auto at = [&](double x) {
                Point q = k;
                q[a] = x;
                return fourier_power(S, R, q);
            };
            double x1 = hi - kInvPhi * (hi - lo), x2 = lo + kInvPhi * (hi - lo);
            double f1 = at(x1), f2 = at(x2);
            for (int it = 0; it < 48; ++it) {
                if (f1 < f2) {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + kInvPhi * (hi - lo);
                    f2 = at(x2);
                } else {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - kInvPhi * (hi - lo);
                    f1 = at(x1);
                }
            }
            const double best = 0.5 * (lo + hi);
            if (at(best) >= at(k[a])) k[a] = best;
        }
        const auto am = atom_mass(S, k, radii);
        if (am.mass > theta && am.stability < stability_bound) refined[m] = BraggPeak{k, am.mass, am.stability};
    });

    std::vector<BraggPeak> peaks;
    for (auto& p : refined)
        if (p) peaks.push_back(*p);
    std::sort(peaks.begin(), peaks.end(), [](const BraggPeak& a, const BraggPeak& b) { return a.location < b.location; });

    // neighbouring grid maxima can refine onto the same peak
    double merge = 0.0;
    for (std::size_t a = 0; a < dim; ++a) merge = std::max(merge, grid.step[a]);
    std::vector<BraggPeak> out;
    for (const auto& p : peaks) {
        auto dup = std::find_if(out.begin(), out.end(),
                                [&](const BraggPeak& q) { return distance(q.location, p.location) < merge; });
        if (dup == out.end()) out.push_back(p);
        else if (p.mass > dup->mass) *dup = p;
    }
    return out;
}

// ---------------------------------------------------------------- criteria

std::vector<Point> default_candidates(const WeightedAtomMeasure& gamma, double search_radius, double grid_step,
                                      double weight_floor) {
    std::vector<Point> out;
    if (gamma.dim() == 0) return out;
    const double g0 = gamma.mass_at(Point::zero(gamma.dim()));
    for (const auto& a : gamma.atoms())
        if (a.location.norm() <= search_radius && a.weight >= weight_floor * g0) out.push_back(a.location);
    if (grid_step > 0.0) {
        const std::size_t dim = gamma.dim();
        const auto steps = static_cast<std::int64_t>(std::floor(search_radius / grid_step));
        std::array<std::int64_t, kMaxDim> j{};
        for (std::size_t a = 0; a < dim; ++a) j[a] = -steps;
        while (true) {
            Point t(dim);
            for (std::size_t a = 0; a < dim; ++a) t[a] = static_cast<double>(j[a]) * grid_step;
            if (t.norm() <= search_radius) out.push_back(t);
            std::size_t a = 0;
            while (a < dim) {
                if (++j[a] <= steps) break;
                j[a] = -steps;
                ++a;
            }
            if (a == dim) break;
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

CriterionReport criterion_gamma_concentration(const WeightedAtomMeasure& gamma, double R, double eps,
                                              const CriterionOptions& opts) {
    if (!(R > 0.0) || !(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "R and eps must be positive");
    const double g0 = gamma_zero(gamma);
    std::vector<Point> accepted;
    std::size_t tested = 0;
    for (const auto& a : gamma.atoms()) {
        if (a.location.norm() > opts.search_radius) continue;
        ++tested;
        if (gamma.mass_in_ball(a.location, R) >= g0 - eps) accepted.push_back(a.location);
    }
    return finish(CriterionId::C3_gamma_concentration, eps, std::move(accepted), tested,
                  2.0 * spacing_from_gamma(gamma, g0) / eps, opts);
}

CriterionReport criterion_gamma_concentration(const AutocorrEstimate& est, double R, double eps,
                                              const CriterionOptions& opts) {
    CriterionReport rep = criterion_gamma_concentration(est.measure, R, eps, opts);
    if (!est.converged) rep.verdict = Verdict::inconclusive;
    return rep;
}

CriterionReport criterion_almost_periods(const PointSet& S, double eps, std::span<const Point> candidates,
                                         std::span<const double> radii, const CriterionOptions& opts) {
    if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
    if (radii.empty()) throw Error(ErrorCode::InvalidArgument, "empty radius schedule");
    require_candidates_dim(candidates, S.dim());
    for (const auto& t : candidates)
        if (t.norm() + eps + radii.back() > S.window_radius() * (1.0 + 1e-12))
            throw Error(ErrorCode::WindowTooSmall, "candidate " + to_string(t) + " leaves no room for the radii");

    std::vector<char> ok(candidates.size(), 0);
    parallel_for(candidates.size(), [&](std::size_t i) {
        const PointSet shifted = translate(S, candidates[i]);
        const PointSet delta = asymmetric_mismatch(S, shifted, eps);
        ok[i] = upper_density(delta, radii).value <= eps;
    });
    std::vector<Point> accepted;
    for (std::size_t i = 0; i < candidates.size(); ++i)
        if (ok[i]) accepted.push_back(candidates[i]);
    const double spacing = S.size() >= 2 ? mean_nn_spacing(S) : std::numeric_limits<double>::infinity();
    return finish(CriterionId::C5_almost_periods, eps, std::move(accepted), candidates.size(), 2.0 * spacing / eps,
                  opts);
}

CriterionReport criterion_atom_concentration(const WeightedAtomMeasure& gamma, double eps,
                                             const CriterionOptions& opts) {
    if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
    const double g0 = gamma_zero(gamma);
    std::vector<Point> accepted;
    std::size_t tested = 0;
    for (const auto& a : gamma.atoms()) {
        if (a.location.norm() > opts.search_radius) continue;
        ++tested;
        if (a.weight >= g0 - eps) accepted.push_back(a.location);
    }
    return finish(CriterionId::ATOM_concentration, eps, std::move(accepted), tested,
                  2.0 * spacing_from_gamma(gamma, g0) / eps, opts);
}

CriterionReport bohr_test_mu_conv_f(const WeightedAtomMeasure& gamma, const TestFunction& f, double eps,
                                    std::span<const Point> candidates, const KGrid& probe_grid,
                                    const CriterionOptions& opts) {
    if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
    if (probe_grid.dim() != gamma.dim()) throw Error(ErrorCode::DimensionMismatch, "probe grid dimension");
    require_candidates_dim(candidates, gamma.dim());
    const double g0 = gamma_zero(gamma);
    const Point c = f.center.dim() ? f.center : Point::zero(gamma.dim());

    // g(u) = sum_a w_a f(u - x_a); f(u - x) != 0 only for |x - (u - c)| < rho
    auto g = [&](const Point& u) {
        std::vector<double> terms;
        gamma.index().for_each_within(u - c, f.support_radius, [&](std::size_t i, double) {
            const auto& a = gamma.atoms()[i];
            terms.push_back(a.weight * f(u - a.location));
        });
        return pairwise_sum(terms);
    };
    const auto probes = probe_grid.nodes();
    std::vector<double> base(probes.size());
    parallel_for(probes.size(), [&](std::size_t i) { base[i] = g(probes[i]); });

    std::vector<char> ok(candidates.size(), 0);
    parallel_for(candidates.size(), [&](std::size_t m) {
        bool good = true;
        for (std::size_t i = 0; i < probes.size() && good; ++i)
            if (!(std::abs(base[i] - g(probes[i] - candidates[m])) < eps)) good = false;
        ok[m] = good;
    });
    std::vector<Point> accepted;
    for (std::size_t i = 0; i < candidates.size(); ++i)
        if (ok[i]) accepted.push_back(candidates[i]);
    return finish(CriterionId::BOHR_mu_conv_f, eps, std::move(accepted), candidates.size(),
                  2.0 * spacing_from_gamma(gamma, g0) / eps, opts);
}

} // namespace apk
