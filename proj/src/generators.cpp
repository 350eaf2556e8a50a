#include "apk/generators.hpp"
#include "apk/parallel.hpp"
#include "apk/rng.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <functional>
#include <limits>
#include <numbers>

namespace apk {

namespace {

constexpr double kWindowSlack = 1e-12;

/// Calls fn(m) for every integer vector m with (m - c)^T G (m - c) <= bound
/// (Fincke-Pohst enumeration on the Cholesky factor of G).
void enumerate_ellipsoid(const Eigen::MatrixXd& G, const Eigen::VectorXd& c, double bound,
                         const std::function<void(const Eigen::VectorXi&)>& fn) {
    const auto n = G.rows();
    Eigen::LLT<Eigen::MatrixXd> llt(G);
    if (llt.info() != Eigen::Success) throw Error(ErrorCode::SingularBasis, "quadratic form is not positive definite");
    const Eigen::MatrixXd U = llt.matrixU();
    Eigen::VectorXi m(n);
    Eigen::VectorXd y(n);

    std::function<void(Eigen::Index, double)> level = [&](Eigen::Index i, double budget) {
        double s = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) s += U(i, j) * y(j);
        const double half = std::sqrt(std::max(budget, 0.0)) / U(i, i);
        const double centre = c(i) - s / U(i, i);
        const auto lo = static_cast<int>(std::ceil(centre - half - 1e-12));
        const auto hi = static_cast<int>(std::floor(centre + half + 1e-12));
        for (int k = lo; k <= hi; ++k) {
            m(i) = k;
            y(i) = k - c(i);
            const double t = U(i, i) * y(i) + s;
            const double rest = budget - t * t;
            if (rest < -1e-12 * bound) continue;
            if (i == 0) fn(m);
            else level(i - 1, rest);
        }
    };
    level(n - 1, bound);
}

Eigen::MatrixXd columns(std::span<const Point> vecs, std::size_t rows) {
    Eigen::MatrixXd M(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(vecs.size()));
    for (std::size_t j = 0; j < vecs.size(); ++j) {
        if (vecs[j].dim() != rows) throw Error(ErrorCode::DimensionMismatch, "basis vector dimension");
        for (std::size_t i = 0; i < rows; ++i) M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = vecs[j][i];
    }
    return M;
}

Eigen::MatrixXd lattice_matrix(std::span<const Point> basis) {
    if (basis.empty() || basis.size() > kMaxDim) throw Error(ErrorCode::InvalidArgument, "lattice basis size");
    const std::size_t n = basis.front().dim();
    if (basis.size() != n) throw Error(ErrorCode::SingularBasis, "basis must have as many vectors as dimensions");
    const Eigen::MatrixXd B = columns(basis, n);
    double scale = 1.0;
    for (std::size_t j = 0; j < n; ++j) scale *= basis[j].norm();
    if (!(scale > 0.0) || std::abs(B.determinant()) <= 1e-12 * scale)
        throw Error(ErrorCode::SingularBasis, "lattice basis is singular");
    return B;
}

/// Points B(m + offset) with norm <= R, in enumeration order.
std::vector<Point> lattice_points(const Eigen::MatrixXd& B, const Eigen::VectorXd& offset, double R) {
    const auto n = B.rows();
    std::vector<Point> out;
    const Eigen::MatrixXd G = B.transpose() * B / (R * R);
    enumerate_ellipsoid(G, -offset, 1.0 + 1e-9, [&](const Eigen::VectorXi& m) {
        const Eigen::VectorXd x = B * (m.cast<double>() + offset);
        if (x.squaredNorm() <= R * R) {
            Point p(static_cast<std::size_t>(n));
            for (Eigen::Index i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = x(i);
            out.push_back(p);
        }
    });
    return out;
}

bool in_window(const RegionSpec& W, const Point& w) {
    if (W.is_ball()) return W.contains(w);
    const auto& b = W.as_box();
    for (std::size_t a = 0; a < w.dim(); ++a)
        if (w[a] < b.lo[a] - kWindowSlack || w[a] >= b.hi[a] - kWindowSlack) return false;
    return true;
}

bool looks_rational(double x) {
    // continued-fraction convergents with denominators up to 10^6
    double rest = x;
    long double p0 = 1, q0 = 0, p1 = std::floor(x), q1 = 1;
    rest = x - std::floor(x);
    for (int it = 0; it < 64; ++it) {
        if (std::abs(x - static_cast<double>(p1 / q1)) <= 1e-14 * std::max(1.0, std::abs(x))) return true;
        if (rest < 1e-15) return true;
        const double inv = 1.0 / rest;
        const double a = std::floor(inv);
        rest = inv - a;
        const long double p2 = a * p1 + p0, q2 = a * q1 + q0;
        if (q2 > 1e6) return false;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
    return false;
}

Point uniform_in_ball(CounterRng& rng, std::size_t dim, double radius) {
    while (true) {
        Point p(dim);
        for (std::size_t a = 0; a < dim; ++a) p[a] = rng.uniform(-radius, radius);
        if (p.norm2() <= radius * radius) return p;
    }
}

PointSet randomized_lattice(const ProcessSampler& p) {
    const Eigen::MatrixXd B = lattice_matrix(p.basis);
    CounterRng rng(p.seed);
    Eigen::VectorXd u(B.rows());
    for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = rng.uniform();
    auto pts = lattice_points(B, u, p.window_radius);
    return PointSet(static_cast<std::size_t>(B.rows()), std::move(pts), p.window_radius, shortest_vector(p.basis));
}

PointSet perturbed_lattice(const ProcessSampler& p) {
    const Eigen::MatrixXd B = lattice_matrix(p.basis);
    const double shortest = shortest_vector(p.basis);
    if (!(p.noise_bound >= 0.0) || p.noise_bound >= shortest / 2.0)
        throw Error(ErrorCode::InvalidArgument, "noise bound must lie in [0, shortest / 2)");
    CounterRng rng(p.seed);
    const auto dim = static_cast<std::size_t>(B.rows());
    Eigen::VectorXd u(B.rows());
    for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = rng.uniform();
    auto sites = lattice_points(B, u, p.window_radius + p.noise_bound);
    std::sort(sites.begin(), sites.end());
    std::vector<Point> pts;
    for (const auto& s : sites) {
        const Point x = s + uniform_in_ball(rng, dim, p.noise_bound);
        if (x.norm2() <= p.window_radius * p.window_radius) pts.push_back(x);
    }
    const double r = p.noise_bound > 0.0 ? shortest - 2.0 * p.noise_bound : shortest;
    return PointSet(dim, std::move(pts), p.window_radius, r);
}

PointSet matern_ii(const ProcessSampler& p) {
    const std::size_t dim = p.dim;
    if (dim == 0 || dim > kMaxDim) throw Error(ErrorCode::InvalidArgument, "unsupported dimension");
    if (!(p.intensity >= 0.0) || !(p.hardcore > 0.0))
        throw Error(ErrorCode::InvalidArgument, "matern needs intensity >= 0 and r > 0");
    const double W = p.window_radius, r = p.hardcore;
    if (p.intensity == 0.0) return PointSet(dim, {}, W, r);

    // proposals in the cube around B_{W + r}, one Poisson draw per small cell
    const double reach = W + r;
    double h = std::min(r, std::pow(1.0 / p.intensity, 1.0 / static_cast<double>(dim)));
    const auto per_axis = static_cast<std::int64_t>(std::ceil(2.0 * reach / h));
    h = 2.0 * reach / static_cast<double>(per_axis);
    const double mean = p.intensity * std::pow(h, static_cast<double>(dim));

    CounterRng rng(p.seed);
    std::vector<Point> prop;
    std::vector<double> mark;
    std::array<std::int64_t, kMaxDim> k{};
    while (true) {
        const auto count = rng.poisson(mean);
        for (std::uint64_t c = 0; c < count; ++c) {
            Point x(dim);
            for (std::size_t a = 0; a < dim; ++a) x[a] = -reach + (static_cast<double>(k[a]) + rng.uniform()) * h;
            const double m = rng.uniform();
            if (x.norm2() <= reach * reach) {
                prop.push_back(x);
                mark.push_back(m);
            }
        }
        std::size_t a = 0;
        while (a < dim) {
            if (++k[a] < per_axis) break;
            k[a] = 0;
            ++a;
        }
        if (a == dim) break;
    }

    const GridIndex idx(prop, r);
    std::vector<Point> kept;
    for (std::size_t i = 0; i < prop.size(); ++i) {
        if (prop[i].norm2() > W * W) continue;
        bool survives = true;
        idx.for_each_within(prop[i], r, [&](std::size_t j, double d2) {
            if (j != i && d2 < r * r && mark[j] < mark[i]) survives = false;
        });
        if (survives) kept.push_back(prop[i]);
    }
    return PointSet(dim, std::move(kept), W, r);
}

double sample_stderr(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    std::vector<double> sq;
    sq.reserve(v.size());
    for (double x : v) sq.push_back((x - mean) * (x - mean));
    const double var = pairwise_sum(sq) / static_cast<double>(v.size() - 1);
    return std::sqrt(var / static_cast<double>(v.size()));
}

/// Points of S inside region B.
template <typename Fn>
void for_each_in_region(const PointSet& S, const RegionSpec& B, Fn&& fn) {
    if (B.is_ball()) {
        S.index().for_each_within(B.as_ball().center, B.as_ball().radius, [&](std::size_t i, double) { fn(i); });
        return;
    }
    const auto& box = B.as_box();
    const Point c = 0.5 * (box.lo + box.hi);
    S.index().for_each_within(c, 0.5 * distance(box.lo, box.hi), [&](std::size_t i, double) {
        if (B.contains(S[i])) fn(i);
    });
}

} // namespace

// -------------------------------------------------------------- deformation

Point Deformation::operator()(const Point& w, std::size_t dim_e) const {
    Point g(dim_e);
    if (kind == Kind::zero) return g;
    double arg = phase;
    for (std::size_t a = 0; a < w.dim(); ++a) arg += 2.0 * std::numbers::pi * frequency[a] * w[a];
    const double s = std::sin(arg);
    for (std::size_t a = 0; a < dim_e; ++a) g[a] = amplitude[a] * s;
    return g;
}

double Deformation::max_displacement() const noexcept { return kind == Kind::zero ? 0.0 : amplitude.norm(); }

// ------------------------------------------------------------ configuration

void CutProjectConfig::validate() const {
    if (n == 0 || n > kMaxDim) throw Error(ErrorCode::InvalidArgument, "ambient dimension must lie in 1..4");
    if (E_basis.empty() || E_basis.size() + F_basis.size() != n)
        throw Error(ErrorCode::InvalidArgument, "E and F bases must together span R^n");
    std::vector<Point> all(E_basis);
    all.insert(all.end(), F_basis.begin(), F_basis.end());
    for (const auto& v : all)
        if (v.dim() != n) throw Error(ErrorCode::DimensionMismatch, "basis vector dimension");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double dot = 0.0;
            for (std::size_t a = 0; a < n; ++a) dot += all[i][a] * all[j][a];
            if (std::abs(dot - (i == j ? 1.0 : 0.0)) > 1e-10)
                throw Error(ErrorCode::InvalidArgument, "E and F bases are not orthonormal");
        }
    if (window && window->dim() != dim_f()) throw Error(ErrorCode::DimensionMismatch, "window lives in F");
    if (torus_offset.dim() != 0 && torus_offset.dim() != n) throw Error(ErrorCode::DimensionMismatch, "torus offset");
    if (!(output_radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "output radius must be positive");
    if (hardcore_radius < 0.0) throw Error(ErrorCode::InvalidArgument, "hardcore radius must be nonnegative");
    if (deformation.kind == Deformation::Kind::sinusoidal &&
        (deformation.amplitude.dim() != dim_e() || deformation.frequency.dim() != dim_f()))
        throw Error(ErrorCode::DimensionMismatch, "deformation amplitude lives in E, frequency in F");
}

bool irrationality_heuristic(const CutProjectConfig& cfg) {
    for (const auto& e : cfg.E_basis) {
        bool generic = true;
        for (std::size_t i = 0; i < e.dim() && generic; ++i) {
            if (e[i] == 0.0) generic = false;
            for (std::size_t j = i + 1; j < e.dim() && generic; ++j)
                if (e[j] != 0.0 && looks_rational(e[i] / e[j])) generic = false;
        }
        if (generic) return true;
    }
    return false;
}

namespace presets {

CutProjectConfig fibonacci(double output_radius) {
    const double tau = std::numbers::phi;
    const double s = std::sqrt(1.0 + tau * tau);
    CutProjectConfig cfg;
    cfg.n = 2;
    cfg.E_basis = {Point{tau / s, 1.0 / s}};
    cfg.F_basis = {Point{-1.0 / s, tau / s}};
    cfg.window = RegionSpec::box(Point{-1.0 / s}, Point{tau / s});
    cfg.torus_offset = Point::zero(2);
    cfg.output_radius = output_radius;
    cfg.hardcore_radius = 1.0 / s;
    return cfg;
}

CutProjectConfig deformed_fibonacci(double output_radius, double amplitude, double frequency, double phase) {
    CutProjectConfig cfg = fibonacci(output_radius);
    cfg.deformation.kind = Deformation::Kind::sinusoidal;
    cfg.deformation.amplitude = Point{amplitude};
    cfg.deformation.frequency = Point{frequency};
    cfg.deformation.phase = phase;
    // neighbours move by at most 2|a|
    cfg.hardcore_radius = std::max(0.0, cfg.hardcore_radius - 2.0 * std::abs(amplitude));
    return cfg;
}

} // namespace presets

// --------------------------------------------------------------- generators

double shortest_vector(std::span<const Point> basis) {
    const Eigen::MatrixXd B = lattice_matrix(basis);
    double L = std::numeric_limits<double>::infinity();
    for (const auto& b : basis) L = std::min(L, b.norm());
    double best = L;
    const Eigen::MatrixXd G = B.transpose() * B / (L * L);
    enumerate_ellipsoid(G, Eigen::VectorXd::Zero(B.cols()), 1.0 + 1e-9, [&](const Eigen::VectorXi& m) {
        if (m.isZero()) return;
        best = std::min(best, (B * m.cast<double>()).norm());
    });
    return best;
}

PointSet make_lattice(std::span<const Point> basis, double window_radius) {
    if (!(window_radius >= 0.0)) throw Error(ErrorCode::InvalidArgument, "window radius must be nonnegative");
    const Eigen::MatrixXd B = lattice_matrix(basis);
    const double r = shortest_vector(basis);
    if (window_radius == 0.0) return PointSet(basis.size(), {Point::zero(basis.size())}, 0.0, r);
    auto pts = lattice_points(B, Eigen::VectorXd::Zero(B.cols()), window_radius);
    return PointSet(basis.size(), std::move(pts), window_radius, r);
}

PointSet cut_and_project(const CutProjectConfig& cfg) {
    cfg.validate();
    const std::size_t de = cfg.dim_e(), df = cfg.dim_f(), n = cfg.n;
    const double R = cfg.output_radius;
    if (!cfg.window) return PointSet(de, {}, R, cfg.hardcore_radius > 0.0 ? cfg.hardcore_radius : 1.0);

    const RegionSpec& W = *cfg.window;
    Point wc(df);
    double wr = 0.0;
    if (W.is_ball()) {
        wc = W.as_ball().center;
        wr = W.as_ball().radius;
    } else {
        wc = 0.5 * (W.as_box().lo + W.as_box().hi);
        wr = 0.5 * distance(W.as_box().lo, W.as_box().hi);
    }
    wr += 1e-9;
    const double Rp = R + cfg.deformation.max_displacement() + 1e-9;

    const Eigen::MatrixXd E = columns(cfg.E_basis, n);
    const Eigen::MatrixXd F = columns(cfg.F_basis, n);
    const Eigen::MatrixXd G = E * E.transpose() / (Rp * Rp) + F * F.transpose() / (wr * wr);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    if (cfg.torus_offset.dim())
        for (std::size_t i = 0; i < n; ++i) u(static_cast<Eigen::Index>(i)) = cfg.torus_offset[i];
    Eigen::VectorXd wcv(static_cast<Eigen::Index>(df));
    for (std::size_t a = 0; a < df; ++a) wcv(static_cast<Eigen::Index>(a)) = wc[a];
    // the ellipsoid |z_E|^2/R'^2 + |z_F - c|^2/rho^2 <= 2 holds the whole strip segment
    const Eigen::VectorXd centre = F * wcv - u;

    std::vector<Point> pts;
    enumerate_ellipsoid(G, centre, 2.0, [&](const Eigen::VectorXi& m) {
        const Eigen::VectorXd z = m.cast<double>() + u;
        const Eigen::VectorXd ze = E.transpose() * z;
        const Eigen::VectorXd zf = F.transpose() * z;
        Point w(df);
        for (std::size_t a = 0; a < df; ++a) w[a] = zf(static_cast<Eigen::Index>(a));
        if (!in_window(W, w)) return;
        const Point g = cfg.deformation(w, de);
        Point x(de);
        for (std::size_t a = 0; a < de; ++a) x[a] = ze(static_cast<Eigen::Index>(a)) + g[a];
        if (x.norm2() <= R * R) pts.push_back(x);
    });

    std::sort(pts.begin(), pts.end());
    const double measured = min_pair_distance(pts);
    if (pts.size() >= 2 && !(measured > 0.0))
        throw Error(ErrorCode::NotUniformlyDiscrete, "projection produced coincident points");
    double r = cfg.hardcore_radius;
    if (r > 0.0 && measured < r * (1.0 - 1e-9))
        throw Error(ErrorCode::NotUniformlyDiscrete, "measured spacing " + std::to_string(measured) +
                                                         " below declared hardcore radius " + std::to_string(r));
    if (r == 0.0) r = std::isfinite(measured) ? measured : 1.0;
    return PointSet::trusted(de, std::move(pts), R, r);
}

// ----------------------------------------------------------------- samplers

std::string_view to_string(ProcessKind k) {
    switch (k) {
    case ProcessKind::randomized_model_set: return "randomized_model_set";
    case ProcessKind::randomized_lattice: return "randomized_lattice";
    case ProcessKind::matern_II: return "matern_II";
    case ProcessKind::perturbed_lattice: return "perturbed_lattice";
    }
    return "?";
}

ProcessSampler ProcessSampler::for_sample(std::uint64_t i) const {
    ProcessSampler p = *this;
    p.seed = split_seed(seed, i);
    return p;
}

std::size_t ProcessSampler::output_dim() const {
    switch (kind) {
    case ProcessKind::randomized_model_set: return model.dim_e();
    case ProcessKind::randomized_lattice:
    case ProcessKind::perturbed_lattice: return basis.size();
    case ProcessKind::matern_II: return dim;
    }
    return 0;
}

PointSet sample(const ProcessSampler& p) {
    if (!(p.window_radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "window radius must be positive");
    switch (p.kind) {
    case ProcessKind::randomized_model_set: {
        CutProjectConfig cfg = p.model;
        CounterRng rng(p.seed);
        cfg.torus_offset = Point::zero(cfg.n);
        for (std::size_t i = 0; i < cfg.n; ++i) cfg.torus_offset[i] = rng.uniform();
        cfg.output_radius = p.window_radius;
        return cut_and_project(cfg);
    }
    case ProcessKind::randomized_lattice: return randomized_lattice(p);
    case ProcessKind::matern_II: return matern_ii(p);
    case ProcessKind::perturbed_lattice: return perturbed_lattice(p);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown process kind");
}

// -------------------------------------------------------------------- Palm

PalmIntensityEstimate palm_intensity(const ProcessSampler& p, const RegionSpec& A, std::size_t n_samples,
                                     std::optional<RegionSpec> B) {
    const std::size_t dim = p.output_dim();
    if (n_samples == 0) throw Error(ErrorCode::InvalidArgument, "need at least one sample");
    if (A.dim() != dim) throw Error(ErrorCode::DimensionMismatch, "region A dimension");
    if (!B) {
        Point lo(dim), hi(dim);
        for (std::size_t a = 0; a < dim; ++a) {
            lo[a] = -0.5;
            hi[a] = 0.5;
        }
        B = RegionSpec::box(lo, hi);
    }
    if (B->dim() != dim) throw Error(ErrorCode::DimensionMismatch, "region B dimension");
    if (A.max_norm() + B->max_norm() > p.window_radius)
        throw Error(ErrorCode::WindowTooSmall, "sample window must contain B + A");

    std::vector<double> per_sample(n_samples);
    parallel_for(n_samples, [&](std::size_t s) {
        const PointSet chi = sample(p.for_sample(s));
        double total = 0.0;
        for_each_in_region(chi, *B, [&](std::size_t i) {
            std::size_t c = 0;
            const RegionSpec shifted = A.is_ball() ? RegionSpec::ball(A.as_ball().center + chi[i], A.as_ball().radius)
                                                   : RegionSpec::box(A.as_box().lo + chi[i], A.as_box().hi + chi[i]);
            for_each_in_region(chi, shifted, [&](std::size_t) { ++c; });
            total += static_cast<double>(c);
        });
        per_sample[s] = total / B->volume();
    });

    PalmIntensityEstimate est{A, 0.0, 0.0, n_samples, *B};
    est.value = pairwise_sum(per_sample) / static_cast<double>(n_samples);
    est.std_error = sample_stderr(per_sample, est.value);
    return est;
}

AcPalmReport verify_acpalm(const ProcessSampler& p, const RegionSpec& A, std::span<const double> radii,
                           std::size_t n_seeds, std::size_t palm_samples, double bin_tol) {
    if (radii.empty() || n_seeds == 0) throw Error(ErrorCode::InvalidArgument, "verify_acpalm needs radii and seeds");
    AcPalmReport rep;
    rep.palm = palm_intensity(p, A, palm_samples);
    rep.per_seed_gamma.resize(n_seeds);
    parallel_for(n_seeds, [&](std::size_t s) {
        const PointSet chi = sample(p.for_sample(palm_samples + s));
        std::vector<double> values;
        for (double R : radii) {
            const auto gamma = finite_autocorrelation(chi, R, bin_tol, A.max_norm() + 1.0);
            values.push_back(gamma.mass_in(A));
        }
        rep.per_seed_gamma[s] = tail_summary(values, 0.5).mean;
    });
    for (double g : rep.per_seed_gamma) rep.per_seed_deviation.push_back(g - rep.palm.value);
    rep.mean_gamma = pairwise_sum(rep.per_seed_gamma) / static_cast<double>(n_seeds);
    rep.gamma_stderr = sample_stderr(rep.per_seed_gamma, rep.mean_gamma);
    return rep;
}

EventAlmostPeriodReport event_almost_periods(const ProcessSampler& p, double R, double eps,
                                             std::span<const Point> candidates, std::size_t n_samples,
                                             const CriterionOptions& opts) {
    if (!(R > 0.0) || !(eps > 0.0) || n_samples == 0)
        throw Error(ErrorCode::InvalidArgument, "event test needs R > 0, eps > 0 and samples");
    const std::size_t dim = p.output_dim();
    for (const auto& t : candidates) {
        if (t.dim() != dim) throw Error(ErrorCode::DimensionMismatch, "candidate dimension");
        if (t.norm() + R > p.window_radius) throw Error(ErrorCode::WindowTooSmall, "candidate leaves the window");
    }

    const Point origin = Point::zero(dim);
    std::vector<std::vector<char>> differs(n_samples);
    std::vector<double> spacing(n_samples);
    parallel_for(n_samples, [&](std::size_t s) {
        const PointSet chi = sample(p.for_sample(s));
        const bool here = chi.index().any_within(origin, R);
        auto& row = differs[s];
        row.resize(candidates.size());
        // (chi - t) meets B_R iff chi meets B(t, R)
        for (std::size_t c = 0; c < candidates.size(); ++c) row[c] = here != chi.index().any_within(candidates[c], R);
        spacing[s] = s == 0 ? mean_nn_spacing(chi) : 0.0;
    });

    EventAlmostPeriodReport rep;
    rep.candidates.assign(candidates.begin(), candidates.end());
    const double n = static_cast<double>(n_samples);
    constexpr double z = 1.959963984540054;
    std::vector<Point> accepted;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        std::size_t hits = 0;
        for (std::size_t s = 0; s < n_samples; ++s) hits += differs[s][c] ? 1 : 0;
        const double ph = static_cast<double>(hits) / n;
        const double centre = ph + z * z / (2.0 * n);
        const double half = z * std::sqrt(ph * (1.0 - ph) / n + z * z / (4.0 * n * n));
        rep.probability.push_back(ph);
        rep.wilson_upper.push_back((centre + half) / (1.0 + z * z / n));
        if (ph <= eps) accepted.push_back(candidates[c]);
    }

    CriterionReport& cr = rep.criterion;
    cr.criterion_id = CriterionId::C5_almost_periods;
    cr.epsilon = eps;
    cr.candidates_tested = candidates.size();
    std::sort(accepted.begin(), accepted.end());
    cr.almost_period_set = std::move(accepted);
    cr.gap_bound = opts.gap_bound > 0.0 ? opts.gap_bound : 2.0 * spacing[0] / eps;
    try {
        cr.gap = relative_density_gap(cr.almost_period_set, opts.search_radius, opts.gap);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::EmptyCandidateSet) throw;
        cr.gap = std::numeric_limits<double>::infinity();
    }
    cr.verdict = cr.gap <= cr.gap_bound ? Verdict::pass : Verdict::fail;
    return rep;
}

} // namespace apk
