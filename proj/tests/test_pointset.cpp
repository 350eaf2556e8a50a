#include "support.hpp"

#include "apk/grid_index.hpp"
#include "apk/numeric.hpp"

#include <doctest.h>

#include <numbers>

using namespace apk;
using namespace apk::testing;

TEST_CASE("ball_volume closed forms") {
    CHECK(ball_volume(1, 3.0) == doctest::Approx(6.0));
    CHECK(ball_volume(2, 1.0) == doctest::Approx(std::numbers::pi));
    CHECK(ball_volume(3, 2.0) == doctest::Approx(32.0 * std::numbers::pi / 3.0));
    CHECK(ball_volume(4, 1.0) == doctest::Approx(std::numbers::pi * std::numbers::pi / 2.0));
}

TEST_CASE("pairwise_sum matches a long-double reference") {
    CounterRng rng(3);
    std::vector<double> xs(10001);
    long double ref = 0.0L;
    for (auto& x : xs) {
        x = rng.uniform(-1.0, 1.0) * 1e3;
        ref += x;
    }
    CHECK(std::abs(pairwise_sum(xs) - static_cast<double>(ref)) < 1e-9);
    CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
}

TEST_CASE("PointSet validates its contract") {
    CHECK_THROWS_AS(PointSet(1, {Point{0.0}, Point{0.5}}, 10.0, 1.0), Error);
    try {
        PointSet(1, {Point{0.0}, Point{0.5}}, 10.0, 1.0);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotUniformlyDiscrete);
    }
    try {
        PointSet(1, {Point{11.0}}, 10.0, 1.0);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::OutsideWindow);
    }
    CHECK_THROWS_AS(PointSet(1, {Point{0.0, 1.0}}, 10.0, 1.0), Error);
    CHECK_THROWS_AS(PointSet(1, {Point{std::nan("")}}, 10.0, 1.0), Error);
    const PointSet S(1, {Point{2.0}, Point{-1.0}, Point{0.0}}, 5.0, 1.0);
    CHECK(S[0][0] == -1.0);
    CHECK(S[2][0] == 2.0);
}

TEST_CASE("count_in_region") {
    const PointSet Z = integers(10.0);
    CHECK(count_in_region(Z, RegionSpec::ball(Point{0.0}, 2.5)) == 5);
    const PointSet empty(1, {}, 10.0, 1.0);
    CHECK(count_in_region(empty, RegionSpec::ball(Point{0.0}, 1.0)) == 0);
    const PointSet Z2 = make_lattice(std::vector<Point>{Point{1.0, 0.0}, Point{0.0, 1.0}}, 20.0);
    CHECK(count_in_region(Z2, RegionSpec::box(Point{0.0, 0.0}, Point{5.0, 5.0})) == 25);
    CHECK_THROWS_AS(count_in_region(Z, RegionSpec::ball(Point{9.0}, 2.0)), Error);
}

TEST_CASE("count_in_region is additive over disjoint boxes") {
    CounterRng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const PointSet S = jittered_lattice(rng, 2, 12.0, 1.0, 0.2);
        const double split = rng.uniform(-3.0, 3.0);
        const auto whole = RegionSpec::box(Point{-4.0, -4.0}, Point{4.0, 4.0});
        const auto left = RegionSpec::box(Point{-4.0, -4.0}, Point{split, 4.0});
        const auto right = RegionSpec::box(Point{split, -4.0}, Point{4.0, 4.0});
        CHECK(count_in_region(S, whole) == count_in_region(S, left) + count_in_region(S, right));
    }
}

TEST_CASE("translate") {
    const PointSet Z = integers(10.0);
    CHECK(translate(Z, Point{0.0}) == Z);
    const PointSet T = translate(Z, Point{0.5});
    CHECK(T.window_radius() == doctest::Approx(9.5));
    CHECK(T.size() == 20);
    CHECK(T[0][0] == doctest::Approx(-9.5));
    CHECK(T[T.size() - 1][0] == doctest::Approx(9.5));
    CHECK_THROWS_AS(translate(Z, Point{11.0}), Error);
}

TEST_CASE("translate is inverted by the opposite shift") {
    CounterRng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const PointSet S = jittered_lattice(rng, 2, 10.0, 1.0, 0.15);
        const Point t{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
        const PointSet back = translate(translate(S, t), -t);
        const double R = S.window_radius() - 2.0 * t.norm() - 1e-9;
        const PointSet a = back.restricted(R), b = S.restricted(R);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(distance(a[i], b[i]) < 1e-12);
    }
}

// Oracle for d: evaluate the covering predicate on a fine grid of a.
double metric_d_grid(const PointSet& S, const PointSet& S2, double step) {
    auto covered = [](const PointSet& from, const PointSet& to, double a) {
        for (const auto& x : from.points()) {
            if (x.norm() > 1.0 / a) continue;
            bool hit = false;
            for (const auto& y : to.points()) hit = hit || distance(x, y) <= a;
            if (!hit) return false;
        }
        return true;
    };
    for (double a = step; a < 1.0 / std::numbers::sqrt2; a += step)
        if (covered(S, S2, a) && covered(S2, S, a)) return a;
    return 1.0 / std::numbers::sqrt2;
}

TEST_CASE("metric_d examples") {
    const PointSet Z = integers(200.0);
    CHECK(metric_d(Z, Z, 0.01) == 0.0);
    const PointSet Zs = integers(199.9, 0.1);
    const double d = metric_d(Z, Zs, 0.01);
    CHECK(std::abs(d - 0.1) <= 0.01);
    CHECK(std::abs(d - metric_d_grid(Z, Zs, 0.001)) <= 0.01);
    const PointSet Zm = integers_without(200.0, {0.0});
    CHECK(metric_d(Z, Zm, 0.01) == doctest::Approx(1.0 / std::numbers::sqrt2));
    CHECK_THROWS_AS(metric_d(integers(50.0), integers(50.0), 0.01), Error);
}

TEST_CASE("metric_d axioms on random windowed sets") {
    CounterRng rng(17);
    for (int trial = 0; trial < 25; ++trial) {
        const double tol = 0.02;
        const PointSet A = jittered_lattice(rng, 1, 60.0, 1.0, 0.3);
        const PointSet B = jittered_lattice(rng, 1, 60.0, 1.0, 0.3);
        const PointSet C = jittered_lattice(rng, 1, 60.0, 1.0, 0.3);
        const double ab = metric_d(A, B, tol), ba = metric_d(B, A, tol);
        const double bc = metric_d(B, C, tol), ac = metric_d(A, C, tol);
        CHECK(ab == ba);
        CHECK(ab >= 0.0);
        CHECK(ab <= 1.0 / std::numbers::sqrt2);
        CHECK(ac <= ab + bc + 2.0 * tol);
        CHECK(metric_d(A, A, tol) == 0.0);
    }
}

TEST_CASE("upper_density") {
    std::vector<double> radii;
    for (int R = 100; R <= 1000; R += 100) radii.push_back(R);
    CHECK(upper_density(integers(1000.0), radii).value == doctest::Approx(1.0).epsilon(0.01));
    CHECK(upper_density(PointSet(1, {}, 1000.0, 1.0), radii).value == 0.0);
    CHECK(upper_density(integers(1000.0, 0.0, 2.0), radii).value == doctest::Approx(0.5).epsilon(0.01));
    const auto est = upper_density(integers(1000.0), radii);
    // limsup surrogate: max over the upper half of the schedule
    CHECK(est.value == *std::max_element(est.tail_values.begin() + 5, est.tail_values.end()));
    CHECK_THROWS_AS(upper_density(integers(100.0), radii), Error);
}

TEST_CASE("upper_density respects the packing bound") {
    CounterRng rng(23);
    const std::vector<double> radii{5.0, 10.0, 15.0};
    for (int trial = 0; trial < 10; ++trial) {
        for (std::size_t dim : {1u, 2u}) {
            const PointSet S = jittered_lattice(rng, dim, 16.0, 1.0, 0.1);
            const double bound = 1.0 / ball_volume(dim, S.hardcore_radius() / 2.0);
            CHECK(upper_density(S, radii).value <= bound);
        }
    }
}

TEST_CASE("relative_density_gap") {
    const PointSet Z = integers(100.0);
    CHECK(relative_density_gap(Z.points(), 100.0) == doctest::Approx(0.5));
    // a single point: a ball of radius M must reach 0 from every centre in B_{100 - M}
    const std::vector<Point> origin{Point{0.0}};
    CHECK(relative_density_gap(origin, 100.0) == doctest::Approx(50.0));
    CHECK(relative_density_gap(integers(1000.0, 0.0, 5.0).points(), 1000.0) == doctest::Approx(2.5));
    CHECK_THROWS_AS(relative_density_gap(std::vector<Point>{}, 10.0), Error);
}

TEST_CASE("relative_density_gap never grows when points are added") {
    CounterRng rng(29);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<Point> A;
        double prev = std::numeric_limits<double>::infinity();
        for (int k = 0; k < 30; ++k) {
            A.push_back(Point{rng.uniform(-20.0, 20.0)});
            const double g = relative_density_gap(A, 20.0);
            CHECK(g <= prev + 1e-12);
            prev = g;
        }
    }
}

TEST_CASE("grid index agrees with brute force") {
    CounterRng rng(31);
    for (std::size_t dim : {1u, 2u, 3u}) {
        const PointSet S = jittered_lattice(rng, dim, 6.0, 1.0, 0.1);
        for (int q = 0; q < 50; ++q) {
            Point c(dim);
            for (std::size_t a = 0; a < dim; ++a) c[a] = rng.uniform(-5.0, 5.0);
            const double rad = rng.uniform(0.0, 3.0);
            std::size_t brute = 0, fast = 0;
            double best = std::numeric_limits<double>::infinity();
            for (const auto& p : S.points()) {
                brute += distance(p, c) <= rad;
                best = std::min(best, distance(p, c));
            }
            S.index().for_each_within(c, rad, [&](std::size_t, double) { ++fast; });
            CHECK(fast == brute);
            const auto nn = S.index().nearest(c, 10.0);
            REQUIRE(nn);
            CHECK(nn->distance == doctest::Approx(best));
        }
    }
}

TEST_CASE("uniform discreteness helpers") {
    const PointSet Z = integers(50.0);
    CHECK(min_pair_distance(Z.points()) == doctest::Approx(1.0));
    CHECK(mean_nn_spacing(Z) == doctest::Approx(1.0));
    CHECK(verify_uniform_discreteness(Z, 1.0));
    CHECK_FALSE(verify_uniform_discreteness(Z, 1.5));
}
