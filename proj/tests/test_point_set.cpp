#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <sstream>

#include "incilab/point_set.hpp"

using namespace incilab;

TEST_CASE("grid generator basics") {
    PointSet single = generate_grid(1, 2);
    REQUIRE(single.size() == 1);
    REQUIRE(single.point(0)[0] == 0.5);
    REQUIRE(single.point(0)[1] == 0.5);

    PointSet four = generate_grid(2, 2);
    REQUIRE(four.size() == 4);
    std::set<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < 4; ++i) pts.insert({four.point(i)[0], four.point(i)[1]});
    REQUIRE(pts == std::set<std::pair<double, double>>{
                       {0.25, 0.25}, {0.25, 0.75}, {0.75, 0.25}, {0.75, 0.75}});

    REQUIRE(generate_grid(10, 3).size() == 1000);
    REQUIRE_THROWS_AS(generate_grid(0, 2), std::invalid_argument);
    REQUIRE_THROWS_AS(generate_grid(3, 1), std::invalid_argument);
}

TEST_CASE("jittered generator") {
    SECTION("zero amplitude reproduces the grid exactly") {
        PointSet a = generate_grid(6, 2);
        PointSet b = generate_jittered(6, 2, 0.0, 99);
        REQUIRE(a.coords() == b.coords());
    }
    SECTION("deterministic in seed") {
        PointSet a = generate_jittered(8, 3, 0.3, 42);
        PointSet b = generate_jittered(8, 3, 0.3, 42);
        REQUIRE(a.coords() == b.coords());
        PointSet c = generate_jittered(8, 3, 0.3, 43);
        REQUIRE(a.coords() != c.coords());
    }
    SECTION("amplitude bounds") {
        REQUIRE_THROWS_AS(generate_jittered(4, 2, 0.5, 1), std::invalid_argument);
        REQUIRE_THROWS_AS(generate_jittered(4, 2, -0.1, 1), std::invalid_argument);
    }
    SECTION("stays in the unit cube") {
        PointSet a = generate_jittered(16, 2, 0.49, 7);
        for (double v : a.coords()) {
            REQUIRE(v >= 0.0);
            REQUIRE(v <= 1.0);
        }
    }
}

TEST_CASE("point set validation") {
    REQUIRE_THROWS_AS(PointSet(2, {0.5, 1.5}, {}), std::invalid_argument);
    REQUIRE_THROWS_AS(PointSet(1, {0.5}, {}), std::invalid_argument);
    REQUIRE_THROWS_AS(PointSet(2, {0.5, 0.5, 0.5}, {}), std::invalid_argument);
    // duplicates are allowed at this level
    REQUIRE_NOTHROW(PointSet(2, {0.5, 0.5, 0.5, 0.5}, {}));
}

TEST_CASE("loader rejects malformed input") {
    std::istringstream empty("");
    REQUIRE_THROWS_AS(load_point_set(empty), std::runtime_error);
    std::istringstream bad_header("# generator=manual\nnot a header\n");
    REQUIRE_THROWS_AS(load_point_set(bad_header), std::runtime_error);
    std::istringstream truncated("2 3\n0.1 0.2\n0.3 0.4\n");
    REQUIRE_THROWS_AS(load_point_set(truncated), std::runtime_error);
    std::istringstream out_of_range("2 1\n0.1 1.2\n");
    REQUIRE_THROWS_AS(load_point_set(out_of_range), std::invalid_argument);
}

TEST_CASE("text serialization round trip") {
    PointSet a = generate_jittered(9, 2, 0.37, 123);
    std::ostringstream os;
    save_point_set(a, os);
    std::string text = os.str();

    REQUIRE(text.find("# generator=jittered") != std::string::npos);
    REQUIRE(text.find("# seed=123") != std::string::npos);
    REQUIRE(text.find("2 81\n") != std::string::npos);

    std::istringstream is(text);
    PointSet b = load_point_set(is);
    REQUIRE(b.dim() == a.dim());
    REQUIRE(b.coords() == a.coords());  // %.17g round-trips doubles exactly
    REQUIRE(b.provenance().generator == "jittered");
}
