#include "support.hpp"

#include "apk/diffraction.hpp"
#include "apk/generators.hpp"
#include "apk/parallel.hpp"

#include <doctest.h>

#include <numbers>

using namespace apk;
using namespace apk::testing;

namespace {

// Fibonacci points by direct strip enumeration over (a, b) in Z^2.
std::vector<double> fibonacci_oracle(double R) {
    const double tau = std::numbers::phi;
    const double s = std::sqrt(1.0 + tau * tau);
    std::vector<double> xs;
    const long n = static_cast<long>(std::ceil(R)) + 3;
    for (long a = -n; a <= n; ++a)
        for (long b = -n; b <= n; ++b) {
            const double w = (-double(a) + tau * double(b)) / s;
            if (w < -1.0 / s - 1e-12 || w >= tau / s - 1e-12) continue;
            const double x = (tau * double(a) + double(b)) / s;
            if (std::abs(x) <= R) xs.push_back(x);
        }
    std::sort(xs.begin(), xs.end());
    return xs;
}

ProcessSampler lattice_process(double window, std::uint64_t seed = 7) {
    ProcessSampler p;
    p.kind = ProcessKind::randomized_lattice;
    p.basis = {Point{1.0}};
    p.window_radius = window;
    p.seed = seed;
    return p;
}

ProcessSampler matern_process(double window, std::uint64_t seed = 11) {
    ProcessSampler p;
    p.kind = ProcessKind::matern_II;
    p.dim = 1;
    p.intensity = 2.0;
    p.hardcore = 0.3;
    p.window_radius = window;
    p.seed = seed;
    return p;
}

} // namespace

TEST_CASE("make_lattice counts") {
    CHECK(make_lattice(std::vector<Point>{Point{1.0}}, 10.0).size() == 21);
    CHECK(make_lattice(std::vector<Point>{Point{2.0}}, 10.0).size() == 11);
    const PointSet Z2 = make_lattice(std::vector<Point>{Point{1.0, 0.0}, Point{0.0, 1.0}}, 5.0);
    std::size_t oracle = 0;
    for (int i = -5; i <= 5; ++i)
        for (int j = -5; j <= 5; ++j) oracle += i * i + j * j <= 25;
    CHECK(Z2.size() == oracle);
    CHECK(Z2.size() == 81);
    CHECK(Z2.hardcore_radius() == doctest::Approx(1.0));
}

TEST_CASE("shortest_vector") {
    CHECK(shortest_vector(std::vector<Point>{Point{3.0}}) == doctest::Approx(3.0));
    CHECK(shortest_vector(std::vector<Point>{Point{1.0, 0.0}, Point{0.0, 2.0}}) == doctest::Approx(1.0));
    // skewed basis of Z^2: the reduced shortest vector is still 1
    CHECK(shortest_vector(std::vector<Point>{Point{1.0, 0.0}, Point{7.0, 1.0}}) == doctest::Approx(1.0));
    const double h = std::sqrt(3.0) / 2.0;
    CHECK(shortest_vector(std::vector<Point>{Point{1.0, 0.0}, Point{10.5, h}}) == doctest::Approx(1.0));
}

TEST_CASE("Fibonacci chain matches strip enumeration") {
    const double R = 200.0;
    const PointSet F = cut_and_project(presets::fibonacci(R));
    const auto oracle = fibonacci_oracle(R);
    REQUIRE(F.size() == oracle.size());
    for (std::size_t i = 0; i < oracle.size(); ++i) CHECK(F[i][0] == doctest::Approx(oracle[i]).epsilon(1e-12));

    const double tau = std::numbers::phi;
    const double s = std::sqrt(1.0 + tau * tau);
    std::size_t longs = 0, shorts = 0;
    for (std::size_t i = 1; i < F.size(); ++i) {
        const double gap = F[i][0] - F[i - 1][0];
        if (near(gap, tau / s, 1e-9)) ++longs;
        else if (near(gap, 1.0 / s, 1e-9)) ++shorts;
        else FAIL("unexpected gap " << gap);
    }
    CHECK(double(longs) / double(shorts) == doctest::Approx(tau).epsilon(0.02));
    CHECK(irrationality_heuristic(presets::fibonacci(10.0)));
}

TEST_CASE("cut_and_project edge cases") {
    auto cfg = presets::fibonacci(50.0);
    cfg.window.reset();
    CHECK(cut_and_project(cfg).empty());

    const PointSet plain = cut_and_project(presets::fibonacci(50.0));
    const PointSet flat = cut_and_project(presets::deformed_fibonacci(50.0, 0.0, 0.1));
    CHECK(flat == plain);

    auto bad = presets::fibonacci(10.0);
    bad.E_basis = {Point{1.0, 1.0}};
    CHECK_THROWS_AS(bad.validate(), Error);

    CutProjectConfig rational;
    rational.n = 2;
    const double s = std::sqrt(5.0);
    rational.E_basis = {Point{2.0 / s, 1.0 / s}};
    rational.F_basis = {Point{-1.0 / s, 2.0 / s}};
    rational.window = RegionSpec::box(Point{-0.5}, Point{0.5});
    rational.output_radius = 10.0;
    CHECK_FALSE(irrationality_heuristic(rational));
}

TEST_CASE("cut_and_project is faithful under enlarging the radius") {
    CounterRng rng(61);
    for (int trial = 0; trial < 8; ++trial) {
        const double R = rng.uniform(20.0, 80.0);
        const double amp = rng.uniform(0.0, 0.1);
        auto big_cfg = presets::deformed_fibonacci(2.0 * R, amp, 0.3, rng.uniform(0.0, 6.0));
        auto small_cfg = big_cfg;
        small_cfg.output_radius = R;
        const PointSet a = cut_and_project(small_cfg);
        const PointSet b = cut_and_project(big_cfg).restricted(R);
        CHECK(a == b);
        CHECK(a.size() > 0);
    }
}

TEST_CASE("deformed Fibonacci stays uniformly discrete") {
    const double tau = std::numbers::phi;
    const double s = std::sqrt(1.0 + tau * tau);
    for (double amp : {0.02, 0.05, 0.1}) {
        const PointSet D = cut_and_project(presets::deformed_fibonacci(300.0, amp, 0.1));
        CHECK(min_pair_distance(D.points()) >= 1.0 / s - 2.0 * amp - 1e-12);
        CHECK(verify_uniform_discreteness(D, D.hardcore_radius()));
    }
}

TEST_CASE("Deformation") {
    Deformation g;
    CHECK(g(Point{0.3}, 1) == Point{0.0});
    CHECK(g.max_displacement() == 0.0);
    g.kind = Deformation::Kind::sinusoidal;
    g.amplitude = Point{0.1};
    g.frequency = Point{0.25};
    CHECK(g(Point{1.0}, 1)[0] == doctest::Approx(0.1));
    CHECK(g(Point{2.0}, 1)[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(g.max_displacement() == doctest::Approx(0.1));
}

TEST_CASE("sampler examples") {
    const PointSet L = sample(lattice_process(50.0));
    for (std::size_t i = 1; i < L.size(); ++i) CHECK(L[i][0] - L[i - 1][0] == doctest::Approx(1.0).epsilon(1e-12));

    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const PointSet M = sample(matern_process(50.0, seed));
        CHECK(min_pair_distance(M.points()) >= 0.3);
        CHECK(verify_uniform_discreteness(M, 0.3));
    }

    ProcessSampler m;
    m.kind = ProcessKind::randomized_model_set;
    m.model = presets::fibonacci(40.0);
    m.window_radius = 40.0;
    const PointSet a = sample(m.for_sample(0)), b = sample(m.for_sample(1));
    CHECK_FALSE(a == b);
    auto gaps = [](const PointSet& S) {
        std::vector<double> g;
        for (std::size_t i = 1; i < S.size(); ++i) g.push_back(std::round((S[i][0] - S[i - 1][0]) * 1e9));
        std::sort(g.begin(), g.end());
        g.erase(std::unique(g.begin(), g.end()), g.end());
        return g;
    };
    CHECK(gaps(a) == gaps(b));
    CHECK(gaps(a).size() == 2);

    ProcessSampler pl = lattice_process(20.0);
    pl.kind = ProcessKind::perturbed_lattice;
    pl.noise_bound = 0.2;
    const PointSet P = sample(pl);
    CHECK(verify_uniform_discreteness(P, 0.6));
    pl.noise_bound = 0.5;
    CHECK_THROWS_AS(sample(pl), Error);
}

TEST_CASE("samplers are reproducible and stationary") {
    const auto p = matern_process(30.0);
    CHECK(sample(p) == sample(p));
    CHECK(sample(p.for_sample(3)) == sample(p.for_sample(3)));
    CHECK_FALSE(sample(p.for_sample(3)) == sample(p.for_sample(4)));

    const auto left = RegionSpec::box(Point{-20.0}, Point{-5.0});
    const auto right = RegionSpec::box(Point{5.0}, Point{20.0});
    std::vector<double> diff;
    for (std::size_t s = 0; s < 200; ++s) {
        const PointSet chi = sample(p.for_sample(s));
        diff.push_back((double(count_in_region(chi, left)) - double(count_in_region(chi, right))) / 15.0);
    }
    double mean = 0.0, var = 0.0;
    for (double d : diff) mean += d;
    mean /= double(diff.size());
    for (double d : diff) var += (d - mean) * (d - mean);
    const double se = std::sqrt(var / double(diff.size() - 1) / double(diff.size()));
    CHECK(std::abs(mean) <= 3.0 * se);
}

TEST_CASE("sampling does not depend on the thread count") {
    const auto p = matern_process(10.0);
    const auto A = RegionSpec::ball(Point{0.0}, 1.0);
    const std::size_t saved = thread_count();
    set_thread_count(1);
    const auto one = palm_intensity(p, A, 40);
    set_thread_count(3);
    const auto three = palm_intensity(p, A, 40);
    set_thread_count(saved);
    CHECK(one.value == three.value);
    CHECK(one.std_error == three.std_error);
}

TEST_CASE("palm_intensity on the randomized lattice") {
    const auto p = lattice_process(5.0);
    CHECK(palm_intensity(p, RegionSpec::ball(Point{0.0}, 0.25), 50).value == doctest::Approx(1.0));
    CHECK(palm_intensity(p, RegionSpec::ball(Point{0.5}, 0.25), 50).value == 0.0);
    CHECK(palm_intensity(p, RegionSpec::ball(Point{1.0}, 0.25), 50).value == doctest::Approx(1.0));
    CHECK(palm_intensity(p, RegionSpec::ball(Point{1.0}, 0.25), 50).std_error == doctest::Approx(0.0));
    CHECK_THROWS_AS(palm_intensity(p, RegionSpec::ball(Point{4.8}, 0.25), 10), Error);
}

TEST_CASE("verify_acpalm on an empty process") {
    ProcessSampler p = matern_process(10.0);
    p.intensity = 0.0;
    const std::vector<double> radii{4.0, 6.0};
    const auto rep = verify_acpalm(p, RegionSpec::ball(Point{0.0}, 1.0), radii, 5, 5);
    CHECK(rep.palm.value == 0.0);
    CHECK(rep.mean_gamma == 0.0);
}

TEST_CASE("event_almost_periods on the randomized lattice") {
    const auto p = lattice_process(5.0);
    const std::vector<Point> periods{Point{-2.0}, Point{1.0}, Point{3.0}};
    const auto exact = event_almost_periods(p, 0.2, 0.1, periods, 200);
    for (double pr : exact.probability) CHECK(pr == 0.0);
    CHECK(exact.criterion.almost_period_set.size() == 3);

    // the two events are disjoint, each of probability 2R = 0.4
    const std::vector<Point> half{Point{0.5}};
    const std::size_t n = 2000;
    const auto rep = event_almost_periods(p, 0.2, 0.1, half, n);
    const double sigma = std::sqrt(0.8 * 0.2 / double(n));
    CHECK(std::abs(rep.probability[0] - 0.8) <= 3.0 * sigma);
    CHECK(rep.wilson_upper[0] >= rep.probability[0]);
    CHECK(rep.criterion.almost_period_set.empty());
    CHECK(rep.criterion.verdict == Verdict::fail);
}

TEST_CASE("a randomized lattice sample passes the almost-period criterion") {
    const PointSet L = sample(lattice_process(1000.0));
    std::vector<Point> cands;
    for (int k = -200; k <= 200; ++k) cands.push_back(Point{0.5 * k});
    CriterionOptions o;
    o.search_radius = 100.0;
    o.gap_bound = 5.0;
    const std::vector<double> radii{250.0, 500.0, 750.0};
    const auto rep = criterion_almost_periods(L, 0.05, cands, radii, o);
    CHECK(rep.almost_period_set.size() == 201);
    CHECK(rep.gap == doctest::Approx(0.5));
    CHECK(rep.verdict == Verdict::pass);
}
