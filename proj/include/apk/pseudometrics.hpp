#pragma once

#include "apk/pointset.hpp"
#include "apk/test_function.hpp"

#include <vector>

namespace apk {

/// Finite-scale value of a limsup-type pseudo-metric.
struct PseudoMetricReport {
    double value = 0.0;
    std::vector<double> radii;
    std::vector<double> per_radius;
    bool converged = false;
    /// Quadrature grid pitch (0 for the non-integral pseudo-metrics).
    double pitch = 0.0;
};

/// Points of a set carried with the window inside which they are faithful.
struct WindowedPoints {
    std::size_t dim = 0;
    std::vector<Point> points;
    double window = 0.0;
};

struct PseudoMetricOptions {
    double tail_fraction = 0.5;
    double converge_threshold = 0.05;
};

/// Points x of S (inside B_{W - a}) whose closed a-ball misses S2.
PointSet asymmetric_mismatch(const PointSet& S, const PointSet& S2, double a);

/// Union of both one-sided mismatch sets.
WindowedPoints mismatch(const PointSet& S, const PointSet& S2, double a);

/// Infimum of {a : upper density of the mismatch set at scale a <= a}, capped at r/2.
/// A return value equal to tol means "at most tol".
double dbar(const PointSet& S, const PointSet& S2, std::span<const double> radii, double tol);

/// Average over t in B_R of metric_d(S - t, S2 - t), by midpoint quadrature.
/// per_radius holds the average over B_{R'} for R' = R/n_radii, ..., R.
PseudoMetricReport dbar_c(const PointSet& S, const PointSet& S2, double R, std::size_t quad_points, double tol,
                          std::size_t n_radii = 4, const PseudoMetricOptions& opts = {});

/// (mu_S * f)(u) = sum over x in S of f(u - x).
double mu_conv_f(const PointSet& S, const TestFunction& f, const Point& u);

/// Average of |mu_S * f - mu_S2 * f| over B_R for each R in radii.
PseudoMetricReport dbar_f(const PointSet& S, const PointSet& S2, const TestFunction& f,
                          std::span<const double> radii, std::size_t quad_points,
                          const PseudoMetricOptions& opts = {});

/// Upper density of the symmetric difference (points equal within 1e-12).
double dtilde(const PointSet& S, const PointSet& S2, std::span<const double> radii);

} // namespace apk
