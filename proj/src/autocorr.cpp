#include "apk/autocorr.hpp"
#include "apk/parallel.hpp"
#include "apk/quadrature.hpp"

#include <atomic>
#include <numeric>
#include <unordered_map>

namespace apk {

namespace {

using CellKey = std::array<std::int64_t, kMaxDim>;

struct CellKeyHash {
    std::size_t operator()(const CellKey& k) const noexcept {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (auto v : k) {
            h ^= static_cast<std::uint64_t>(v);
            h *= 0x100000001b3ULL;
            h ^= h >> 29;
        }
        return static_cast<std::size_t>(h);
    }
};

struct Cell {
    double weight = 0.0;
    Point weighted_sum;
};

using CellMap = std::unordered_map<CellKey, Cell, CellKeyHash>;

// round() is odd-symmetric, so the cell of -v is the negation of the cell of v
CellKey quantize(const Point& v, double pitch) {
    CellKey k{};
    for (std::size_t a = 0; a < v.dim(); ++a) k[a] = static_cast<std::int64_t>(std::llround(v[a] / pitch));
    return k;
}

void deposit(CellMap& cells, const Point& v, double w, double pitch) {
    auto& c = cells[quantize(v, pitch)];
    if (c.weight == 0.0) c.weighted_sum = Point::zero(v.dim());
    c.weight += w;
    c.weighted_sum += w * v;
}

struct Cluster {
    Point center;
    double weight = 0.0;
    Point weighted_sum;
};

/// Leader clustering of cells followed by a merge pass. `scale` multiplies
/// every weight on output.
std::vector<Atom> cluster_cells(std::size_t dim, const CellMap& cells, double bin_tol, double scale) {
    struct Entry {
        double weight;
        Point centroid;
        Point weighted_sum;
    };
    std::vector<Entry> entries;
    entries.reserve(cells.size());
    for (const auto& [key, c] : cells) entries.push_back({c.weight, c.weighted_sum * (1.0 / c.weight), c.weighted_sum});
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.weight != b.weight) return a.weight > b.weight;
        const double na = a.centroid.norm2(), nb = b.centroid.norm2();
        if (na != nb) return na < nb;
        return a.centroid < b.centroid;
    });

    std::vector<Cluster> clusters;
    std::unordered_map<CellKey, std::vector<std::size_t>, CellKeyHash> centers;
    auto center_key = [&](const Point& p) {
        CellKey k{};
        for (std::size_t a = 0; a < dim; ++a) k[a] = static_cast<std::int64_t>(std::floor(p[a] / bin_tol));
        return k;
    };
    for (const auto& e : entries) {
        const CellKey home = center_key(e.centroid);
        std::optional<std::size_t> best;
        double best_d2 = bin_tol * bin_tol;
        CellKey probe{};
        std::array<int, kMaxDim> off{};
        for (std::size_t a = 0; a < dim; ++a) off[a] = -1;
        while (true) {
            for (std::size_t a = 0; a < dim; ++a) probe[a] = home[a] + off[a];
            if (auto it = centers.find(probe); it != centers.end()) {
                for (auto id : it->second) {
                    const double d2 = distance2(clusters[id].center, e.centroid);
                    if (d2 < best_d2 || (d2 == best_d2 && best && id < *best)) {
                        best_d2 = d2;
                        best = id;
                    }
                }
            }
            std::size_t a = 0;
            while (a < dim) {
                if (++off[a] <= 1) break;
                off[a] = -1;
                ++a;
            }
            if (a == dim) break;
        }
        if (best && best_d2 < bin_tol * bin_tol) {
            clusters[*best].weight += e.weight;
            clusters[*best].weighted_sum += e.weighted_sum;
        } else {
            centers[home].push_back(clusters.size());
            clusters.push_back({e.centroid, e.weight, e.weighted_sum});
        }
    }

    std::vector<Atom> atoms;
    atoms.reserve(clusters.size());
    for (const auto& c : clusters) {
        atoms.push_back({c.weighted_sum * (1.0 / c.weight), c.weight});
    }

    // Weight-averaged locations may drift closer than bin_tol; merge until stable.
    for (int pass = 0; pass < 16; ++pass) {
        std::vector<Point> locs;
        locs.reserve(atoms.size());
        for (const auto& a : atoms) locs.push_back(a.location);
        const GridIndex idx(locs, bin_tol);
        std::vector<std::size_t> parent(atoms.size());
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](std::size_t i) {
            while (parent[i] != i) i = parent[i] = parent[parent[i]];
            return i;
        };
        bool merged = false;
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            idx.for_each_within(locs[i], bin_tol, [&](std::size_t j, double d2) {
                if (j != i && d2 < bin_tol * bin_tol) {
                    const auto ri = find(i), rj = find(j);
                    if (ri != rj) {
                        parent[std::max(ri, rj)] = std::min(ri, rj);
                        merged = true;
                    }
                }
            });
        }
        if (!merged) break;
        std::vector<Atom> next;
        std::unordered_map<std::size_t, std::size_t> slot;
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            const auto root = find(i);
            auto [it, fresh] = slot.try_emplace(root, next.size());
            if (fresh) next.push_back({Point::zero(dim), 0.0});
            auto& dst = next[it->second];
            dst.location += atoms[i].weight * atoms[i].location;
            dst.weight += atoms[i].weight;
        }
        for (auto& a : next) a.location *= 1.0 / a.weight;
        atoms = std::move(next);
    }

    for (auto& a : atoms) a.weight *= scale;
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.location < b.location; });
    return atoms;
}

double resolve_bin_tol(const PointSet& S, double bin_tol) {
    const double tol = bin_tol > 0.0 ? bin_tol : 1e-3 * S.hardcore_radius();
    if (tol >= S.hardcore_radius() / 4.0) throw Error(ErrorCode::InvalidArgument, "bin_tol must be below r/4");
    return tol;
}

} // namespace

// ------------------------------------------------------- WeightedAtomMeasure

WeightedAtomMeasure::WeightedAtomMeasure(std::size_t dim, std::vector<Atom> atoms, double bin_tol)
    : dim_(dim), atoms_(std::move(atoms)), bin_tol_(bin_tol) {
    if (!(bin_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "bin_tol must be positive");
    for (const auto& a : atoms_) {
        if (a.location.dim() != dim) throw Error(ErrorCode::DimensionMismatch, "atom dimension");
        if (!(a.weight > 0.0)) throw Error(ErrorCode::InvalidArgument, "atom weights must be positive");
    }
    std::sort(atoms_.begin(), atoms_.end(), [](const Atom& a, const Atom& b) { return a.location < b.location; });
    locations_.reserve(atoms_.size());
    for (const auto& a : atoms_) locations_.push_back(a.location);
}

const GridIndex& WeightedAtomMeasure::index() const {
    auto idx = std::atomic_load(&index_);
    if (!idx) {
        idx = std::make_shared<const GridIndex>(locations_, bin_tol_ > 0.0 ? std::max(bin_tol_, 1e-9) : 1.0);
        std::atomic_store(&index_, idx);
    }
    return *idx;
}

double WeightedAtomMeasure::total_mass() const {
    std::vector<double> w;
    w.reserve(atoms_.size());
    for (const auto& a : atoms_) w.push_back(a.weight);
    return pairwise_sum(w);
}

double WeightedAtomMeasure::mass_at(const Point& p) const {
    if (atoms_.empty()) return 0.0;
    const auto hit = index().nearest(p, bin_tol_);
    return hit ? atoms_[hit->index].weight : 0.0;
}

double WeightedAtomMeasure::mass_in_ball(const Point& center, double radius) const {
    std::vector<double> w;
    index().for_each_within(center, radius, [&](std::size_t i, double) { w.push_back(atoms_[i].weight); });
    return pairwise_sum(w);
}

double WeightedAtomMeasure::mass_in(const RegionSpec& A) const {
    std::vector<double> w;
    for (const auto& a : atoms_)
        if (A.contains(a.location)) w.push_back(a.weight);
    return pairwise_sum(w);
}

WeightedAtomMeasure bin_atoms(std::size_t dim, std::span<const Atom> raw, double bin_tol) {
    if (!(bin_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "bin_tol must be positive");
    CellMap cells;
    for (const auto& a : raw) deposit(cells, a.location, a.weight, bin_tol / 4.0);
    return WeightedAtomMeasure(dim, cluster_cells(dim, cells, bin_tol, 1.0), bin_tol);
}

// ----------------------------------------------------------------- operations

WeightedAtomMeasure finite_autocorrelation(const PointSet& S, double R, double bin_tol, double diff_cutoff) {
    if (!(R > 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be positive");
    if (R > S.window_radius() * (1.0 + 1e-12)) throw Error(ErrorCode::RadiusExceedsWindow, "R exceeds window");
    const double tol = resolve_bin_tol(S, bin_tol);
    const double cutoff = diff_cutoff > 0.0 ? diff_cutoff : 2.0 * R;
    const PointSet inner = S.restricted(std::min(R, S.window_radius()));
    const double pitch = tol / 4.0;

    CellMap cells;
    const auto& idx = inner.index();
    for (std::size_t i = 0; i < inner.size(); ++i) {
        const Point& x = inner[i];
        idx.for_each_within(x, cutoff, [&](std::size_t j, double) { deposit(cells, inner[j] - x, 1.0, pitch); });
    }
    const double vol = ball_volume(S.dim(), R);
    return WeightedAtomMeasure(S.dim(), cluster_cells(S.dim(), cells, tol, 1.0 / vol), tol);
}

AutocorrEstimate autocorrelation_limit(const PointSet& S, std::span<const double> radii, const AutocorrOptions& opts) {
    if (radii.empty()) throw Error(ErrorCode::InvalidArgument, "empty radius schedule");
    if (radii.back() > S.window_radius() * (1.0 + 1e-12))
        throw Error(ErrorCode::RadiusExceedsWindow, "largest radius exceeds window");
    const double tol = resolve_bin_tol(S, opts.bin_tol);

    std::vector<WeightedAtomMeasure> measures(radii.size());
    parallel_for(radii.size(), [&](std::size_t k) {
        measures[k] = finite_autocorrelation(S, radii[k], tol, opts.diff_cutoff);
    });

    AutocorrEstimate est;
    est.radius_schedule.assign(radii.begin(), radii.end());
    const Point origin = Point::zero(S.dim());
    for (const auto& m : measures) est.per_radius_mass_at_zero.push_back(m.mass_at(origin));
    est.measure = measures.back();

    const double track_radius = opts.track_radius > 0.0 ? opts.track_radius : 20.0 * S.hardcore_radius();
    const double gamma0 = est.measure.mass_at(origin);
    auto tail_count = static_cast<std::size_t>(std::ceil(opts.tail_fraction * static_cast<double>(radii.size())));
    tail_count = std::clamp<std::size_t>(tail_count, 1, radii.size());

    est.converged = true;
    for (const auto& atom : est.measure.atoms()) {
        if (atom.location.norm() > track_radius || atom.weight < opts.track_floor * gamma0) continue;
        ++est.tracked_atoms;
        std::vector<double> w;
        for (std::size_t k = radii.size() - tail_count; k < radii.size(); ++k) w.push_back(measures[k].mass_at(atom.location));
        if (tail_summary(w, 1.0).relative_spread >= opts.converge_threshold) est.converged = false;
    }
    return est;
}

double hf_functional(const PointSet& S, const TestFunction& psi, const TestFunction& f) {
    if (!(psi.amplitude > 0.0) || std::abs(psi.integral(S.dim()) - 1.0) > 1e-9)
        throw Error(ErrorCode::PsiNotNormalized, "psi must be nonnegative with unit integral");
    const Point origin = Point::zero(S.dim());
    const Point psi_c = psi.center.dim() ? psi.center : origin;
    const Point f_c = f.center.dim() ? f.center : origin;
    if (psi_c.norm() + psi.support_radius + f_c.norm() + f.support_radius > S.window_radius() * (1.0 + 1e-12))
        throw Error(ErrorCode::OutsideWindow, "supports of psi and f leave the faithful window");

    std::vector<double> terms;
    const auto& idx = S.index();
    idx.for_each_within(psi_c, psi.support_radius, [&](std::size_t i, double) {
        const double px = psi(S[i]);
        if (px == 0.0) return;
        std::vector<double> inner;
        idx.for_each_within(S[i] + f_c, f.support_radius, [&](std::size_t j, double) { inner.push_back(f(S[j] - S[i])); });
        terms.push_back(px * pairwise_sum(inner));
    });
    return pairwise_sum(terms);
}

double birkhoff_average_hf(const PointSet& S, const TestFunction& psi, const TestFunction& f, double R,
                           std::size_t quad_points) {
    if (!(psi.amplitude > 0.0) || std::abs(psi.integral(S.dim()) - 1.0) > 1e-9)
        throw Error(ErrorCode::PsiNotNormalized, "psi must be nonnegative with unit integral");
    const Point origin = Point::zero(S.dim());
    const Point psi_c = psi.center.dim() ? psi.center : origin;
    const Point f_c = f.center.dim() ? f.center : origin;
    const double reach = R + psi_c.norm() + psi.support_radius;
    if (reach + f_c.norm() + f.support_radius > S.window_radius() * (1.0 + 1e-12))
        throw Error(ErrorCode::WindowTooSmall, "window cannot accommodate R plus the supports");

    // H_f(S - t) = sum_x psi(x - t) F(x) with F(x) = sum_y f(y - x)
    const auto& idx = S.index();
    std::vector<double> F(S.size(), 0.0);
    idx.for_each_within(origin, reach, [&](std::size_t i, double) {
        std::vector<double> inner;
        idx.for_each_within(S[i] + f_c, f.support_radius, [&](std::size_t j, double) { inner.push_back(f(S[j] - S[i])); });
        F[i] = pairwise_sum(inner);
    });

    const auto nodes = midpoint_nodes(S.dim(), R, quad_points);
    std::vector<double> h(nodes.size());
    parallel_for(nodes.size(), [&](std::size_t k) {
        std::vector<double> terms;
        idx.for_each_within(nodes[k] + psi_c, psi.support_radius, [&](std::size_t i, double) {
            terms.push_back(psi(S[i] - nodes[k]) * F[i]);
        });
        h[k] = pairwise_sum(terms);
    });
    return nodes.empty() ? 0.0 : pairwise_sum(h) / static_cast<double>(nodes.size());
}

double evaluate(const WeightedAtomMeasure& mu, const TestFunction& f) {
    if (mu.empty()) return 0.0;
    const Point c = f.center.dim() ? f.center : Point::zero(mu.dim());
    std::vector<double> terms;
    mu.index().for_each_within(c, f.support_radius, [&](std::size_t i, double) {
        terms.push_back(mu.atoms()[i].weight * f(mu.atoms()[i].location));
    });
    return pairwise_sum(terms);
}

} // namespace apk
