#pragma once

#include "apk/autocorr.hpp"
#include "apk/pointset.hpp"

#include <complex>
#include <optional>
#include <string_view>
#include <vector>

namespace apk {

/// Regular grid lo + j * step per axis, j = 0 .. floor((hi - lo) / step).
struct KGrid {
    Point lo;
    Point hi;
    Point step;

    std::size_t dim() const noexcept { return lo.dim(); }
    std::vector<std::size_t> shape() const;
    std::vector<Point> nodes() const;
};

enum class Normalization { per_volume, atom_mass };

std::string_view to_string(Normalization n);

struct Periodogram {
    std::size_t dim = 0;
    KGrid grid;
    std::vector<Point> k;
    std::vector<double> values;
    double radius_used = 0.0;
    Normalization normalization = Normalization::per_volume;
    /// Set when some axis step exceeds 1 / (4R).
    bool resolution_warning = false;
};

/// sum over x in S cap B_R of exp(-2 pi i k.x)
std::complex<double> fourier_sum(const PointSet& S, double R, const Point& k);

/// per_volume: |F_R(k)|^2 / |B_R|; atom_mass: |F_R(k)|^2 / |B_R|^2.
Periodogram periodogram(const PointSet& S, double R, const KGrid& grid,
                        Normalization norm = Normalization::per_volume);

struct AtomMassEstimate {
    double mass = 0.0;
    double stability = 0.0;
    std::vector<double> per_radius;
};

AtomMassEstimate atom_mass(const PointSet& S, const Point& k, std::span<const double> radii,
                           double tail_fraction = 0.5);

struct BraggPeak {
    Point location;
    double mass = 0.0;
    double stability = 0.0;
};

/// Local maxima of the largest-radius periodogram above theta * |B_R|, refined
/// by golden-section search and kept when mass > theta and stability < bound.
std::vector<BraggPeak> detect_bragg_peaks(const PointSet& S, std::span<const double> radii, const KGrid& grid,
                                          double theta, double stability_bound = 0.2);

/// Default theta: 0.05 * (density at the largest radius)^2.
double default_bragg_threshold(const PointSet& S, std::span<const double> radii, double factor = 0.05);

enum class CriterionId { C3_gamma_concentration, C5_almost_periods, ATOM_concentration, BOHR_mu_conv_f };
enum class Verdict { pass, fail, inconclusive };

std::string_view to_string(CriterionId id);
std::string_view to_string(Verdict v);

struct CriterionReport {
    CriterionId criterion_id = CriterionId::C3_gamma_concentration;
    double epsilon = 0.0;
    std::vector<Point> almost_period_set;
    /// Infinity when nothing was accepted inside the search ball.
    double gap = 0.0;
    double gap_bound = 0.0;
    Verdict verdict = Verdict::inconclusive;
    std::size_t candidates_tested = 0;
};

struct CriterionOptions {
    double search_radius = 100.0;
    /// 0 selects 2 * spacing / eps, where spacing is the mean nearest-neighbour
    /// distance of S, or gamma(0)^(-1/n) when only the autocorrelation is known.
    double gap_bound = 0.0;
    GapOptions gap;
};

/// gamma atoms inside B_search_radius weighing at least weight_floor * gamma(0),
/// plus the nodes of a cubic grid of pitch grid_step (0 disables the grid).
std::vector<Point> default_candidates(const WeightedAtomMeasure& gamma, double search_radius, double grid_step,
                                      double weight_floor = 0.1);

/// t accepted iff gamma(t + B_R) >= gamma(0) - eps; candidates are the atoms of gamma.
CriterionReport criterion_gamma_concentration(const WeightedAtomMeasure& gamma, double R, double eps,
                                              const CriterionOptions& opts = {});
/// Same, but inconclusive unless the estimate converged.
CriterionReport criterion_gamma_concentration(const AutocorrEstimate& est, double R, double eps,
                                              const CriterionOptions& opts = {});

/// t accepted iff the upper density of the eps-mismatch between S and S - t is <= eps.
CriterionReport criterion_almost_periods(const PointSet& S, double eps, std::span<const Point> candidates,
                                         std::span<const double> radii, const CriterionOptions& opts = {});

/// t accepted iff t is an atom of gamma with mass >= gamma(0) - eps.
CriterionReport criterion_atom_concentration(const WeightedAtomMeasure& gamma, double eps,
                                             const CriterionOptions& opts = {});

/// g = gamma * f sampled on probe_grid; t accepted iff sup |g(u) - g(u - t)| < eps.
CriterionReport bohr_test_mu_conv_f(const WeightedAtomMeasure& gamma, const TestFunction& f, double eps,
                                    std::span<const Point> candidates, const KGrid& probe_grid,
                                    const CriterionOptions& opts = {});

} // namespace apk
