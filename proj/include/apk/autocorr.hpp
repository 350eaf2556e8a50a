#pragma once

#include "apk/pointset.hpp"
#include "apk/test_function.hpp"

#include <memory>
#include <vector>

namespace apk {

struct Atom {
    Point location;
    double weight = 0.0;
};

/// Purely atomic measure. Atoms are pairwise at least bin_tol apart and sorted
/// lexicographically by location.
class WeightedAtomMeasure {
public:
    WeightedAtomMeasure() = default;
    WeightedAtomMeasure(std::size_t dim, std::vector<Atom> atoms, double bin_tol);

    std::size_t dim() const noexcept { return dim_; }
    double bin_tol() const noexcept { return bin_tol_; }
    std::span<const Atom> atoms() const noexcept { return atoms_; }
    std::size_t size() const noexcept { return atoms_.size(); }
    bool empty() const noexcept { return atoms_.empty(); }

    double total_mass() const;
    /// Weight of the atom within bin_tol of p, or 0.
    double mass_at(const Point& p) const;
    /// Summed weight of atoms in the closed ball B(center, radius).
    double mass_in_ball(const Point& center, double radius) const;
    double mass_in(const RegionSpec& A) const;

    const GridIndex& index() const;

private:
    std::size_t dim_ = 0;
    std::vector<Atom> atoms_;
    double bin_tol_ = 0.0;
    std::vector<Point> locations_;
    mutable std::shared_ptr<const GridIndex> index_;
};

/// Groups weighted locations into atoms: locations are first quantised to a
/// grid of pitch bin_tol / 4, cells are then absorbed by the heaviest centre
/// within bin_tol, and any atoms still closer than bin_tol are merged.
/// Merged atoms carry the summed weight at the weight-averaged location.
WeightedAtomMeasure bin_atoms(std::size_t dim, std::span<const Atom> raw, double bin_tol);

struct AutocorrOptions {
    /// 0 selects 1e-3 * r.
    double bin_tol = 0.0;
    /// Largest difference vector kept; 0 selects 2R (all pairs).
    double diff_cutoff = 0.0;
    /// Atoms tracked for the convergence flag lie within this radius; 0 selects 20 r.
    double track_radius = 0.0;
    /// ... and weigh at least this fraction of the mass at 0.
    double track_floor = 0.1;
    double converge_threshold = 0.05;
    double tail_fraction = 0.5;
};

struct AutocorrEstimate {
    WeightedAtomMeasure measure;
    std::vector<double> radius_schedule;
    std::vector<double> per_radius_mass_at_zero;
    bool converged = false;
    std::size_t tracked_atoms = 0;
};

/// gamma_R = |B_R|^{-1} sum over x, y in S cap B_R of delta_{y - x}.
WeightedAtomMeasure finite_autocorrelation(const PointSet& S, double R, double bin_tol, double diff_cutoff = 0.0);

AutocorrEstimate autocorrelation_limit(const PointSet& S, std::span<const double> radii,
                                       const AutocorrOptions& opts = {});

/// H_f(S) = sum over x, y in S of psi(x) f(y - x).
double hf_functional(const PointSet& S, const TestFunction& psi, const TestFunction& f);

/// |B_R|^{-1} times the integral over t in B_R of H_f(S - t), midpoint rule.
double birkhoff_average_hf(const PointSet& S, const TestFunction& psi, const TestFunction& f, double R,
                           std::size_t quad_points);

/// Sum of weight * f(location).
double evaluate(const WeightedAtomMeasure& mu, const TestFunction& f);

} // namespace apk
