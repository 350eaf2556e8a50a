#include "support.hpp"

#include "apk/io.hpp"

#include <doctest.h>

#include <sstream>

using namespace apk;
using namespace apk::testing;

TEST_CASE("point-set CSV round trip is exact") {
    CounterRng rng(71);
    for (std::size_t dim : {1u, 2u, 3u}) {
        const PointSet S = jittered_lattice(rng, dim, 5.0, 1.0, 0.1);
        std::istringstream is(pointset_csv(S));
        const PointSet T = read_pointset_csv(is);
        CHECK(T == S);
        CHECK(T.window_radius() == S.window_radius());
        CHECK(T.hardcore_radius() == S.hardcore_radius());
        CHECK(pointset_csv(T) == pointset_csv(S));
    }
    std::istringstream empty(pointset_csv(PointSet(2, {}, 3.0, 1.0)));
    CHECK(read_pointset_csv(empty).empty());
}

TEST_CASE("point-set CSV rejects bad input") {
    std::istringstream no_header("0.0\n1.0\n");
    CHECK_THROWS_AS(read_pointset_csv(no_header), Error);
    std::istringstream close("# dim=1\n# r=1\n# window=5\n0.0\n0.5\n");
    try {
        read_pointset_csv(close);
        FAIL("accepted points closer than r");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotUniformlyDiscrete);
    }
    std::istringstream junk("# dim=1\n# r=1\n# window=5\nabc\n");
    CHECK_THROWS_AS(read_pointset_csv(junk), Error);
}

TEST_CASE("measure CSV round trip") {
    const WeightedAtomMeasure mu(2, {{Point{0.0, 0.0}, 1.0}, {Point{0.1, -0.3}, 1.0 / 3.0}}, 0.01);
    std::ostringstream os;
    write_measure_csv(os, mu);
    std::istringstream is(os.str());
    const auto nu = read_measure_csv(is);
    REQUIRE(nu.size() == mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) {
        CHECK(nu.atoms()[i].location == mu.atoms()[i].location);
        CHECK(nu.atoms()[i].weight == mu.atoms()[i].weight);
    }
}

TEST_CASE("format_real is shortest-exact") {
    for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) CHECK(std::stod(format_real(x)) == x);
    CHECK(real_json(std::numeric_limits<double>::infinity()).is_null());
}

TEST_CASE("region and generator documents") {
    const auto ball = region_from_json(json::parse(R"({"ball": {"center": [1, 2], "radius": 0.5}})"));
    CHECK(ball.is_ball());
    CHECK(ball.contains(Point{1.0, 2.5}));
    const auto box = region_from_json(json::parse(R"({"box": {"lo": [0], "hi": [1]}})"));
    CHECK(box.contains(Point{0.0}));
    CHECK_FALSE(box.contains(Point{1.0}));
    CHECK(to_json(box) == json::parse(R"({"box": {"lo": [0.0], "hi": [1.0]}})"));
    CHECK_THROWS_AS(region_from_json(json::parse(R"({"sphere": {}})")), Error);

    const auto cfg = presets::deformed_fibonacci(30.0, 0.05, 0.1);
    const auto back = cut_project_from_json(to_json(cfg));
    CHECK(cut_and_project(back) == cut_and_project(cfg));

    ProcessSampler p;
    p.kind = ProcessKind::matern_II;
    p.intensity = 1.5;
    p.seed = 99;
    const auto q = sampler_from_json(to_json(p));
    CHECK(sample(q) == sample(p));
}

TEST_CASE("reject_unknown_keys") {
    const json j = json::parse(R"({"radius": 1, "radiuss": 2})");
    CHECK_NOTHROW(reject_unknown_keys(json::parse(R"({"radius": 1})"), {"radius"}, "test"));
    try {
        reject_unknown_keys(j, {"radius"}, "test");
        FAIL("unknown key accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ParseError);
        CHECK(std::string(e.what()).find("radiuss") != std::string::npos);
    }
}
