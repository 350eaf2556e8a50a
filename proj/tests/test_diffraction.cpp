#include "support.hpp"

#include "apk/diffraction.hpp"

#include <doctest.h>

#include <numbers>

using namespace apk;
using namespace apk::testing;

namespace {

// |sum_{|m| <= N} e^{-2 pi i k m}|^2 in closed form.
double comb_sum_sq(double k, double N) {
    const double s = std::sin(std::numbers::pi * k);
    if (std::abs(s) < 1e-14) return (2.0 * N + 1.0) * (2.0 * N + 1.0);
    const double v = std::sin(std::numbers::pi * k * (2.0 * N + 1.0)) / s;
    return v * v;
}

ProcessSampler matern(std::uint64_t seed, double window) {
    ProcessSampler p;
    p.kind = ProcessKind::matern_II;
    p.intensity = 2.0;
    p.hardcore = 0.4;
    p.window_radius = window;
    p.seed = seed;
    return p;
}

} // namespace

TEST_CASE("fourier_sum") {
    const PointSet single(1, {Point{0.0}}, 5.0, 1.0);
    CHECK(std::abs(fourier_sum(single, 5.0, Point{0.37}) - 1.0) < 1e-15);
    const PointSet Z = integers(100.0);
    CHECK(std::abs(fourier_sum(Z, 100.0, Point{0.0}) - 201.0) < 1e-12);
    CHECK(std::abs(fourier_sum(Z, 100.0, Point{0.5})) <= 1.0 + 1e-9);
    for (double k : {0.1, 0.25, 0.3333, 1.7}) CHECK(std::norm(fourier_sum(Z, 100.0, Point{k})) == doctest::Approx(comb_sum_sq(k, 100.0)));
    CHECK_THROWS_AS(fourier_sum(Z, 101.0, Point{0.0}), Error);
}

TEST_CASE("periodogram") {
    const double R = 500.0;
    const PointSet Z = integers(R);
    const KGrid ints{Point{-2.0}, Point{2.0}, Point{1.0}};
    const auto pg = periodogram(Z, R, ints);
    REQUIRE(pg.values.size() == 5);
    for (double v : pg.values) CHECK(v == doctest::Approx(1001.0 * 1001.0 / (2.0 * R)));
    const KGrid half{Point{0.5}, Point{0.5}, Point{1.0}};
    CHECK(periodogram(Z, R, half).values[0] <= (1.0 + 1e-9) / (2.0 * R));
    const auto empty = periodogram(PointSet(1, {}, R, 1.0), R, ints);
    for (double v : empty.values) CHECK(v == 0.0);
    CHECK(periodogram(Z, R, KGrid{Point{0.0}, Point{1.0}, Point{0.1}}).resolution_warning);
    CHECK_FALSE(periodogram(Z, R, KGrid{Point{0.0}, Point{0.01}, Point{1e-4}}).resolution_warning);
}

TEST_CASE("periodogram is even and nonnegative on random sets") {
    CounterRng rng(61);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t dim = 1 + trial % 2;
        const PointSet S = jittered_lattice(rng, dim, 10.0, 1.0, 0.3);
        Point k(dim);
        for (std::size_t a = 0; a < dim; ++a) k[a] = rng.uniform(-3.0, 3.0);
        Point unit(dim);
        for (std::size_t a = 0; a < dim; ++a) unit[a] = 1.0;
        const KGrid g{k, k, unit};
        const KGrid gm{-k, -k, g.step};
        const double a = periodogram(S, 10.0, g).values[0], b = periodogram(S, 10.0, gm).values[0];
        CHECK(a >= 0.0);
        CHECK(a == doctest::Approx(b).epsilon(1e-9));
        CHECK(std::abs(fourier_sum(S, 10.0, k)) <= static_cast<double>(S.size()) + 1e-9);
    }
}

TEST_CASE("periodogram averages to the density over one dual period") {
    const double R = 500.0;
    const auto pg = periodogram(integers(R), R, KGrid{Point{0.0}, Point{1.0 - 1.0 / 4000.0}, Point{1.0 / 4000.0}});
    REQUIRE(pg.values.size() == 4000);
    CHECK(pairwise_sum(pg.values) / 4000.0 == doctest::Approx(1001.0 / (2.0 * R)).epsilon(1e-9));
}

TEST_CASE("atom_mass") {
    const std::vector<double> radii{500.0, 1000.0, 1500.0, 2000.0};
    const PointSet Z = integers(2000.0);
    const auto one = atom_mass(Z, Point{1.0}, radii);
    CHECK(std::abs(one.mass - 1.0) <= 0.01);
    double oracle = 0.0;
    for (double R : {1500.0, 2000.0}) oracle += comb_sum_sq(1.0, R) / (4.0 * R * R) / 2.0;
    CHECK(one.mass == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(atom_mass(Z, Point{0.5}, radii).mass <= 1e-6);
    const PointSet single(1, {Point{0.0}}, 2000.0, 1.0);
    CHECK(atom_mass(single, Point{0.3}, radii).mass <= 1.0 / (4.0 * 1500.0 * 1500.0));
}

TEST_CASE("atom_mass is insensitive to translating the set") {
    const std::vector<double> radii{250.0, 500.0, 750.0, 1000.0};
    const PointSet fib = cut_and_project(presets::fibonacci(1010.0));
    const double s = std::sqrt(1.0 + std::numbers::phi * std::numbers::phi);
    // a Bragg position of the chain: the projection of a dual lattice vector
    const Point k{(std::numbers::phi * 1.0 + 1.0) / s};
    const double a = atom_mass(fib.restricted(1000.0), k, radii).mass;
    const double b = atom_mass(translate(fib, Point{4.1}), k, radii).mass;
    CHECK(a > 0.05);
    CHECK(std::abs(a - b) <= 10.0 / 750.0 * a);
}

TEST_CASE("detect_bragg_peaks on the integer lattice") {
    const std::vector<double> radii{250.0, 500.0, 750.0, 1000.0};
    const auto peaks = detect_bragg_peaks(integers(1000.0), radii, KGrid{Point{-3.2}, Point{3.2}, Point{1.0 / 4000.0}}, 0.1);
    REQUIRE(peaks.size() == 7);
    for (std::size_t i = 0; i < peaks.size(); ++i) {
        CHECK(peaks[i].location[0] == doctest::Approx(double(i) - 3.0).epsilon(1e-9));
        CHECK(std::abs(peaks[i].mass - 1.0) <= 0.02);
        CHECK(peaks[i].stability < 0.2);
    }
    CHECK(detect_bragg_peaks(PointSet(1, {}, 1000.0, 1.0), radii, KGrid{Point{-1.0}, Point{1.0}, Point{0.01}}, 0.1).empty());
}

TEST_CASE("Matern samples have no stable peak besides k = 0") {
    const std::vector<double> radii{75.0, 150.0, 225.0, 300.0};
    const KGrid grid{Point{-3.2}, Point{3.2}, Point{1.0 / 1200.0}};
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const PointSet S = sample(matern(split_seed(99, seed), 300.0));
        const auto peaks = detect_bragg_peaks(S, radii, grid, default_bragg_threshold(S, radii));
        REQUIRE(peaks.size() == 1);
        CHECK(std::abs(peaks[0].location[0]) < 1e-3);
    }
}

TEST_CASE("criterion_gamma_concentration") {
    const std::vector<double> radii{500.0, 1000.0, 1500.0, 2000.0};
    AutocorrOptions o;
    o.diff_cutoff = 105.0;
    const auto z = autocorrelation_limit(integers(2000.0), radii, o);
    const auto rep = criterion_gamma_concentration(z, 0.1, 0.1);
    CHECK(rep.verdict == Verdict::pass);
    CHECK(rep.gap == doctest::Approx(0.5));
    for (int m = -100; m <= 100; ++m)
        CHECK(std::binary_search(rep.almost_period_set.begin(), rep.almost_period_set.end(), Point{double(m)},
                                 [](const Point& a, const Point& b) { return a[0] < b[0] - 1e-9; }));
    CHECK(rep.gap <= rep.gap_bound);

    const WeightedAtomMeasure zero(1, {}, 0.01);
    CHECK_THROWS_AS(criterion_gamma_concentration(zero, 0.1, 0.1), Error);
}

TEST_CASE("criterion_almost_periods on Z") {
    const PointSet Z = integers(60.0);
    const std::vector<Point> cands{Point{0.0}, Point{1.0}, Point{-1.0}, Point{2.0}, Point{-2.0}, Point{0.5}};
    CriterionOptions co;
    co.search_radius = 2.5;
    const std::vector<double> radii{20.0, 40.0, 55.0};
    const auto rep = criterion_almost_periods(Z, 0.1, cands, radii, co);
    REQUIRE(rep.almost_period_set.size() == 5);
    for (const auto& t : rep.almost_period_set) CHECK(t[0] == std::round(t[0]));
    CHECK(rep.gap == doctest::Approx(0.5));
    CHECK(rep.verdict == Verdict::pass);
    const auto none = criterion_almost_periods(Z, 0.1, std::vector<Point>{}, radii, co);
    CHECK(std::isinf(none.gap));
    CHECK(none.verdict == Verdict::fail);
    CHECK_THROWS_AS(criterion_almost_periods(Z, 0.1, std::vector<Point>{Point{10.0}}, radii, co), Error);
}

TEST_CASE("criteria on the Fibonacci chain and a Matern sample") {
    const std::vector<double> radii{250.0, 500.0, 750.0, 1000.0};
    const double eps = 0.1;
    AutocorrOptions o;
    o.bin_tol = 0.05;
    o.diff_cutoff = 65.0;
    o.track_floor = 0.5;
    CriterionOptions co;
    co.search_radius = 50.0;
    const std::vector<double> c5r{250.0, 500.0, 750.0};
    const KGrid probe{Point{-10.0}, Point{10.0}, Point{0.02}};
    const TestFunction f(BumpShape::cosine, 0.3, 1.0);

    const PointSet fib = cut_and_project(presets::fibonacci(1000.0));
    const auto gf = autocorrelation_limit(fib, radii, o);
    const auto cands = default_candidates(gf.measure, co.search_radius, 0.5);
    const auto c3 = criterion_gamma_concentration(gf, 0.05, eps, co);
    const auto c5 = criterion_almost_periods(fib, eps, cands, c5r, co);
    const auto bohr = bohr_test_mu_conv_f(gf.measure, f, eps, cands, probe, co);
    CHECK(c3.verdict == Verdict::pass);
    CHECK(c5.verdict == Verdict::pass);
    CHECK(bohr.verdict == Verdict::pass);
    CHECK(std::isfinite(c3.gap));
    CHECK(std::isfinite(c5.gap));

    // a lone accepted period has gap search_radius / 2, so the search ball must exceed twice the bound
    o.diff_cutoff = 115.0;
    const PointSet mat = sample(matern(7, 1000.0));
    const auto gm = autocorrelation_limit(mat, radii, o);
    CriterionOptions mo = co;
    mo.search_radius = 100.0;
    const auto mc = default_candidates(gm.measure, mo.search_radius, 0.5);
    mo.gap_bound = 2.0 * mean_nn_spacing(mat) / 0.05;
    const auto m5 = criterion_almost_periods(mat, 0.05, mc, c5r, mo);
    CHECK(m5.verdict == Verdict::fail);
    CHECK(m5.almost_period_set.size() == 1);
    CHECK(criterion_gamma_concentration(gm, 0.05, 0.05, mo).verdict == Verdict::fail);
    CHECK(bohr_test_mu_conv_f(gm.measure, f, 0.05, mc, probe, mo).verdict == Verdict::fail);
}

TEST_CASE("criterion_atom_concentration") {
    const std::vector<double> radii{500.0, 1000.0, 1500.0, 2000.0};
    AutocorrOptions o;
    o.diff_cutoff = 105.0;
    const auto z = autocorrelation_limit(integers(2000.0), radii, o);
    const auto rep = criterion_atom_concentration(z.measure, 0.1);
    CHECK(rep.verdict == Verdict::pass);
    CHECK(rep.almost_period_set.size() == 201);

    const WeightedAtomMeasure lone(1, {{Point{0.0}, 1.0}}, 0.01);
    CHECK(criterion_atom_concentration(lone, 0.1).verdict == Verdict::fail);
}

TEST_CASE("perturbed lattice: ATOM fails while Bragg peaks remain") {
    ProcessSampler p;
    p.kind = ProcessKind::perturbed_lattice;
    p.basis = {Point{1.0}};
    p.noise_bound = 0.2;
    p.window_radius = 1000.0;
    p.seed = 5;
    const PointSet S = sample(p);
    const std::vector<double> radii{250.0, 500.0, 750.0, 1000.0};
    AutocorrOptions o;
    o.diff_cutoff = 110.0;
    const auto g = autocorrelation_limit(S, radii, o);
    CriterionOptions co;
    co.search_radius = 100.0;
    CHECK(criterion_atom_concentration(g.measure, 0.05, co).verdict == Verdict::fail);
    const auto peaks = detect_bragg_peaks(S, radii, KGrid{Point{-1.2}, Point{1.2}, Point{1.0 / 4000.0}},
                                          default_bragg_threshold(S, radii));
    REQUIRE(peaks.size() == 3);
    // mass at k = 1 is the squared characteristic function of the noise
    const double sinc = std::sin(0.4 * std::numbers::pi) / (0.4 * std::numbers::pi);
    CHECK(peaks[2].mass == doctest::Approx(sinc * sinc).epsilon(0.1));
}

TEST_CASE("bohr_test_mu_conv_f") {
    const std::vector<double> radii{500.0, 1000.0, 1500.0, 2000.0};
    AutocorrOptions o;
    o.diff_cutoff = 30.0;
    const auto z = autocorrelation_limit(integers(2000.0), radii, o);
    const TestFunction f(BumpShape::triangle, 0.4, 1.0);
    std::vector<Point> cands;
    for (int i = -40; i <= 40; ++i) cands.push_back(Point{0.5 * i});
    CriterionOptions co;
    co.search_radius = 20.0;
    const KGrid probe{Point{-5.0}, Point{5.0}, Point{0.01}};
    const auto rep = bohr_test_mu_conv_f(z.measure, f, 0.05, cands, probe, co);
    CHECK(rep.verdict == Verdict::pass);
    CHECK(rep.almost_period_set.size() == 41);

    const WeightedAtomMeasure lone(1, {{Point{0.0}, 1.0}}, 0.01);
    co.gap_bound = 2.0;
    const auto fail = bohr_test_mu_conv_f(lone, f, 0.05, cands, probe, co);
    CHECK(fail.verdict == Verdict::fail);
    CHECK(fail.almost_period_set.size() == 1);
}
