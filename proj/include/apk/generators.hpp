#pragma once

#include "apk/autocorr.hpp"
#include "apk/diffraction.hpp"
#include "apk/pointset.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace apk {

/// g(w) = amplitude * sin(2 pi frequency.w + phase), with amplitude a vector in E
/// coordinates and frequency a vector in F coordinates.
struct Deformation {
    enum class Kind { zero, sinusoidal };
    Kind kind = Kind::zero;
    Point amplitude;
    Point frequency;
    double phase = 0.0;

    Point operator()(const Point& w, std::size_t dim_e) const;
    /// sup |g|
    double max_displacement() const noexcept;
};

/// Cut-and-project data: R^n = E + F with orthonormal bases given as vectors
/// of R^n. Points are psi(z) = z_E + g(z_F) for z in (u + Z^n) with z_F in W.
struct CutProjectConfig {
    std::size_t n = 0;
    std::vector<Point> E_basis;
    std::vector<Point> F_basis;
    /// Window in F coordinates; empty means W is empty. Boxes are half-open,
    /// balls closed. Internal coordinates within 1e-12 of the lower face of a
    /// box count as inside and within 1e-12 of the upper face as outside.
    std::optional<RegionSpec> window;
    Deformation deformation;
    Point torus_offset;
    double output_radius = 0.0;
    /// Declared hardcore radius; 0 records the measured minimum spacing.
    double hardcore_radius = 0.0;

    std::size_t dim_e() const noexcept { return E_basis.size(); }
    std::size_t dim_f() const noexcept { return F_basis.size(); }

    /// Orthonormality and dimension checks (throws InvalidArgument).
    void validate() const;
};

/// Heuristic: some E basis vector has no coordinate ratio p/q with q <= 10^6
/// matching to 1e-14 relative (round-off level; a looser match would accept
/// every real through its convergents). Reported, not proven.
bool irrationality_heuristic(const CutProjectConfig& cfg);

namespace presets {

/// Fibonacci chain: E spanned by (tau, 1)/s, F by (-1, tau)/s, s = sqrt(1 + tau^2),
/// W = [-1/s, tau/s). Gaps are tau/s and 1/s.
CutProjectConfig fibonacci(double output_radius);

/// Fibonacci data with a sinusoidal deformation along E.
CutProjectConfig deformed_fibonacci(double output_radius, double amplitude, double frequency, double phase = 0.0);

} // namespace presets

/// Points of the lattice spanned by the columns `basis` inside B_window_radius.
PointSet make_lattice(std::span<const Point> basis, double window_radius);

/// Shortest nonzero vector length of the lattice spanned by basis.
double shortest_vector(std::span<const Point> basis);

PointSet cut_and_project(const CutProjectConfig& cfg);

enum class ProcessKind { randomized_model_set, randomized_lattice, matern_II, perturbed_lattice };

std::string_view to_string(ProcessKind k);

struct ProcessSampler {
    ProcessKind kind = ProcessKind::randomized_lattice;
    /// randomized_model_set
    CutProjectConfig model;
    /// randomized_lattice, perturbed_lattice
    std::vector<Point> basis;
    /// matern_II
    double intensity = 1.0;
    double hardcore = 0.3;
    std::size_t dim = 1;
    /// perturbed_lattice: noise is uniform in the closed ball of this radius
    double noise_bound = 0.0;
    std::uint64_t seed = 0;
    double window_radius = 10.0;

    /// Copy whose seed is split_seed(seed, i): the i-th Monte Carlo sample.
    ProcessSampler for_sample(std::uint64_t i) const;
    std::size_t output_dim() const;
};

PointSet sample(const ProcessSampler& p);

struct PalmIntensityEstimate {
    RegionSpec region;
    double value = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0;
    RegionSpec B_used;
};

/// J(A) = mean over samples of |B|^{-1} sum over x in chi cap B of card((chi - x) cap A).
/// B defaults to the unit cube [-1/2, 1/2)^n. Sample i uses p.for_sample(i).
PalmIntensityEstimate palm_intensity(const ProcessSampler& p, const RegionSpec& A, std::size_t n_samples,
                                     std::optional<RegionSpec> B = std::nullopt);

struct AcPalmReport {
    PalmIntensityEstimate palm;
    std::vector<double> per_seed_gamma;
    std::vector<double> per_seed_deviation;
    double mean_gamma = 0.0;
    double gamma_stderr = 0.0;
};

/// Compares gamma_R(A) of independent samples with the Palm intensity. Seeds
/// for the autocorrelation side start at index palm_samples so the two
/// estimates use disjoint samples.
AcPalmReport verify_acpalm(const ProcessSampler& p, const RegionSpec& A, std::span<const double> radii,
                           std::size_t n_seeds, std::size_t palm_samples, double bin_tol = 0.0);

struct EventAlmostPeriodReport {
    CriterionReport criterion;
    std::vector<Point> candidates;
    std::vector<double> probability;
    std::vector<double> wilson_upper;
};

/// Monte Carlo estimate of P({chi cap B_R != 0} xor {(chi - t) cap B_R != 0})
/// for each candidate; accepted iff the estimate is <= eps.
EventAlmostPeriodReport event_almost_periods(const ProcessSampler& p, double R, double eps,
                                             std::span<const Point> candidates, std::size_t n_samples,
                                             const CriterionOptions& opts = {});

} // namespace apk
