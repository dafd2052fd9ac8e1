#include <doctest.h>

#include <algorithm>
#include <stdexcept>

#include "illiq/grid.hpp"

using namespace illiq;

TEST_SUITE_BEGIN("grid");

TEST_CASE("uniform grid") {
    const TimeGrid g = TimeGrid::uniform(2.0, 8);
    CHECK(g.size() == 9);
    CHECK(g[0] == 0.0);
    CHECK(g.horizon() == 2.0);
    CHECK(g.index_of(0.5) == 2);
    CHECK(g.contains(1.75));
    CHECK(!g.contains(0.3));
    CHECK_THROWS_AS((void)g.index_of(0.3), std::invalid_argument);
}

TEST_CASE("from_times validation") {
    CHECK_THROWS_AS(TimeGrid::from_times({}), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid::from_times({0.5, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid::from_times({0.0, 1.0, 1.0}), std::invalid_argument);
    CHECK_NOTHROW(TimeGrid::from_times({0.0}));
}

TEST_CASE("refined grid: spacings shrink geometrically to the floor") {
    const double eps = 0x1.0p-12;
    const TimeGrid g = TimeGrid::refined(1.0, 0x1.0p-6, eps);
    REQUIRE(g.eps_floor().has_value());
    CHECK(*g.eps_floor() == eps);
    CHECK(g[0] == 0.0);
    CHECK(g.horizon() == 1.0);
    const auto& t = g.times();
    double prev_dt = t[1] - t[0];
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
        const double dt = t[i + 1] - t[i];
        CHECK(dt > 0.0);
        CHECK(dt <= prev_dt * (1.0 + 1e-9));
        prev_dt = dt;
    }
    CHECK(t[t.size() - 1] - t[t.size() - 2] == doctest::Approx(eps).epsilon(1e-12));
    CHECK(g.contains(1.0 - eps));
}

TEST_CASE("gentle tail ratios keep the spacing proportional to the gap") {
    const double eps = 0x1.0p-14;
    const TimeGrid g = TimeGrid::refined(1.0, 2.0 * eps, eps, 0.9375);
    const auto& t = g.times();
    // Within the geometric tail the spacing stays a fixed fraction of
    // the remaining time.
    for (std::size_t i = 0; i + 2 < t.size(); ++i) {
        const double gap = 1.0 - t[i];
        const double dt = t[i + 1] - t[i];
        if (gap < 0.5 * 2.0 * eps * 16.0) continue;  // body region
        CHECK(dt <= gap);
    }
    CHECK(t[t.size() - 1] - t[t.size() - 2] == doctest::Approx(eps).epsilon(1e-9));
}

TEST_CASE("refined grid parameter validation") {
    CHECK_THROWS_AS(TimeGrid::refined(1.0, 0x1.0p-6, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid::refined(1.0, 0x1.0p-14, 0x1.0p-6), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid::refined(0.0, 0.1, 0.01), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid::refined(1.0, 0x1.0p-6, 0x1.0p-10, 1.5), std::invalid_argument);
}

TEST_SUITE_END();
