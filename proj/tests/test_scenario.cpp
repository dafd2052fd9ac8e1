#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "illiq/config.hpp"
#include "illiq/math.hpp"
#include "illiq/rng.hpp"
#include "illiq/scenario.hpp"
#include "illiq/stats.hpp"

using namespace illiq;

namespace {

ScenarioSpec make_spec(Kind k, double horizon = 1.0, std::size_t n = 20000) {
    ScenarioSpec s;
    s.kind = k;
    s.horizon = horizon;
    s.n_paths = n;
    s.seed = 424242;
    return s;
}

}  // namespace

TEST_SUITE_BEGIN("scenario");

TEST_CASE("spec parsing: defaults, sections, unknown keys") {
    const std::string text =
        "schema_version = 1\n"
        "kind = kind2_canonical\n"
        "horizon = 2.0\n"
        "n_paths = 5000\n"
        "seed = 9\n"
        "[grid]\n"
        "base_dt = 0.125\n"
        "[kind2]\n"
        "z0 = 1.0\n";
    const auto spec = ScenarioSpec::from_config(Config::parse_string(text));
    CHECK(spec.kind == Kind::Kind2Canonical);
    CHECK(spec.horizon == 2.0);
    CHECK(spec.n_paths == 5000);
    CHECK(spec.grid_base_dt == 0.125);
    CHECK(spec.post_default == PostDefaultCurve::Flat);

    CHECK_THROWS_WITH_AS(
        (void)ScenarioSpec::from_config(Config::parse_string(
            "schema_version = 1\nkind = kind2_canonical\nmystery = 3\n")),
        doctest::Contains("unknown key 'mystery'"), ConfigError);
    // Parameters of other kinds count as unknown keys too.
    CHECK_THROWS_AS((void)ScenarioSpec::from_config(Config::parse_string(
                        "schema_version = 1\nkind = kind2_canonical\n[kind1]\nvolatility = 1\n")),
                    ConfigError);
    CHECK_THROWS_AS((void)ScenarioSpec::from_config(Config::parse_string("kind = kind1\n")),
                    ConfigError);  // schema_version required
    CHECK_THROWS_AS((void)ScenarioSpec::from_config(Config::parse_string(
                        "schema_version = 2\nkind = kind1\n")),
                    ConfigError);
    CHECK_THROWS_AS((void)ScenarioSpec::from_config(Config::parse_string(
                        "schema_version = 1\nkind = kind9\n")),
                    std::invalid_argument);
}

TEST_CASE("spec validation catches degenerate parameters") {
    ScenarioSpec s = make_spec(Kind::PureIlliquidity);
    s.pure_x = {0.0, 0.0, 0.0, 0.0};
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = make_spec(Kind::Kind2Canonical);
    s.n_paths = 0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = make_spec(Kind::Kind2Canonical);
    s.grid_refine = true;  // needs eps_floor
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("all builders satisfy the market invariants under both measures") {
    const TimeGrid grid = TimeGrid::from_times({0.0, 0.5, 1.0});
    for (const Kind k : {Kind::Kind1, Kind::Kind2Canonical, Kind::Kind3Hyper,
                         Kind::Kind4Composite, Kind::PureIlliquidity}) {
        const Scenario sc(make_spec(k, 1.0, 2000));
        for (const Measure m : {Measure::Q, Measure::Qcheck}) {
            const MarketPaths run = sc.simulate(m, grid, 2000, 7, 2);
            CHECK_NOTHROW(run.check_invariants());
            if (m == Measure::Q) {
                // The deflator never explodes under Q.
                for (std::size_t p = 0; p < run.n_paths; ++p) CHECK(run.tau().never(p));
            }
        }
    }
}

TEST_CASE("kind2: flat market leg and closed forms") {
    const Scenario sc(make_spec(Kind::Kind2Canonical));
    CHECK(sc.q0(1.0) == 1.0);
    CHECK(sc.qcheck0_closed(1.0) ==
          doctest::Approx(1.0 + 2.0 * normal_cdf(-1.0)).epsilon(1e-14));
    CHECK(sc.expected_deflator(1.0) ==
          doctest::Approx(1.0 - 2.0 * normal_cdf(-1.0)).epsilon(1e-14));
    CHECK(sc.pb_true_martingale());
    CHECK(!sc.z_true_martingale());

    const TimeGrid grid = TimeGrid::from_times({0.0, 0.5, 1.0});
    const MarketPaths run = sc.simulate(Measure::Qcheck, grid, 5000, 3);
    const auto q = sc.q_price(run, 0.5, 1.0);
    for (std::size_t p = 0; p < run.n_paths; ++p) {
        CHECK(q[p] == (run.tau().alive_at(p, 1) ? 1.0 : 0.0));
    }
}

TEST_CASE("kind2: closed-form conditional price agrees with a nested restart") {
    const Scenario sc(make_spec(Kind::Kind2Canonical));
    const TimeGrid grid = TimeGrid::from_times({0.0, 0.5, 1.0});
    const MarketPaths run = sc.simulate(Measure::Qcheck, grid, 64, 5);
    const auto closed = sc.qcheck_price(run, 0.5, 1.0);
    const std::size_t n_inner = 1 << 14;
    for (std::size_t p = 0; p < 8; ++p) {
        const double nested = sc.nested_qcheck(run, p, 0.5, 1.0, n_inner, 11);
        CHECK(std::abs(nested - closed[p]) <= 5.0 / std::sqrt(double(n_inner)));
    }
}

TEST_CASE("pure illiquidity: prices, errors and the maturity flag") {
    FunctionSpec f;  // constant 1
    CHECK(pure_illiquidity_price(0.0, 1.0, 1.0, f) ==
          doctest::Approx(1.0 - std::exp(-0.5)).epsilon(1e-14));
    CHECK(pure_fundamental_price(0.0, 1.0, f) == 1.0);
    CHECK(pure_illiquidity_price(1.0, 1.0, 1.0, f, /*at_maturity=*/true) == 1.0);
    CHECK_THROWS_AS((void)pure_illiquidity_price(1.0, 1.0, 1.0, f), std::invalid_argument);

    // Exponential fundamental curve.
    FunctionSpec fe{FunctionSpec::Type::Exponential, 1.0, -0.1};
    CHECK(pure_fundamental_price(0.0, 2.0, fe) == doctest::Approx(std::exp(-0.2)));
}

TEST_CASE("pure illiquidity: closed forms match Monte Carlo off the unit anchor") {
    // Start vector with |x| != 1 pins the norm dependence of the price.
    ScenarioSpec spec = make_spec(Kind::PureIlliquidity, 1.0, 100000);
    spec.pure_x = {1.2, 0.0, 0.0, 0.0};
    const Scenario sc(spec);
    const TimeGrid grid = TimeGrid::from_times({0.0, 1.0});
    const MarketPaths run = sc.simulate(Measure::Q, grid, spec.n_paths, 17, 2);
    const auto z1 = sc.z_terminal(run, 1.0);
    const MCEstimate m = mc_mean(z1);
    CHECK(std::abs(m.mean - sc.expected_deflator(1.0)) <= 4.0 * m.stderr_);
}

TEST_CASE("pure illiquidity: conditional price formula matches nested restarts") {
    const Scenario sc(make_spec(Kind::PureIlliquidity));
    const TimeGrid grid = TimeGrid::from_times({0.0, 0.5, 1.0});
    const MarketPaths run = sc.simulate(Measure::Q, grid, 64, 29);
    const auto q = sc.q_price(run, 0.5, 1.0);
    const std::size_t n_inner = 1 << 14;
    const auto sampler = sc.make_deflator_sampler(run, 0.5, 1.0);
    for (std::size_t p = 0; p < 8; ++p) {
        // E[X_t/X_T | F_t]: the price by definition of the numeraire.
        rng::PathStream gen(31, p);
        double acc = 0.0;
        for (std::size_t k = 0; k < n_inner; ++k) acc += sampler(p, gen);
        const double nested = acc / double(n_inner);
        CHECK(std::abs(nested - q[p]) <= 5.0 / std::sqrt(double(n_inner)));
    }
}

TEST_CASE("hyperliquidity price") {
    CHECK(hyperliquidity_price(0.0, 1.0, 1.0) ==
          doctest::Approx(1.0 - 2.0 * normal_cdf(-1.0)).epsilon(1e-14));
    CHECK(hyperliquidity_price(0.0, 1.0, 50.0) > 1.0 - 1e-12);
    CHECK_THROWS_AS((void)hyperliquidity_price(1.0, 1.0, 1.0), std::invalid_argument);

    // Restarted Monte Carlo at (0.5, 1 | X = 1).
    rng::PathStream gen(55, 0);
    const double sdt = std::sqrt(0.5);
    const std::size_t n = 100000;
    std::vector<double> draws(n);
    for (auto& d : draws) {
        const double y0 = 1.0 + sdt * gen.next_gaussian();
        const double y1 = sdt * gen.next_gaussian();
        const double y2 = sdt * gen.next_gaussian();
        d = 1.0 / std::sqrt(y0 * y0 + y1 * y1 + y2 * y2);
    }
    const MCEstimate m = mc_mean(draws);
    CHECK(std::abs(m.mean - hyperliquidity_price(0.5, 1.0, 1.0)) <= 3.0 * m.stderr_);
}

TEST_CASE("kind4: conditional premium changes sign across paths") {
    const Scenario sc(make_spec(Kind::Kind4Composite, 1.0, 4000));
    const TimeGrid grid = TimeGrid::from_times({0.0, 0.5, 1.0});
    const MarketPaths run = sc.simulate(Measure::Qcheck, grid, 4000, 12);
    const auto q = sc.q_price(run, 0.5, 1.0);
    const auto qc = sc.qcheck_price(run, 0.5, 1.0);
    std::size_t pos = 0, neg = 0;
    for (std::size_t p = 0; p < run.n_paths; ++p) {
        if (!run.tau().alive_at(p, 1)) continue;
        const double l = qc[p] - q[p];
        if (l > 1e-6) ++pos;
        if (l < -1e-6) ++neg;
    }
    CHECK(pos > 0);
    CHECK(neg > 0);
}

TEST_CASE("classifier maps the bundled scenarios to their cells") {
    const auto cell = [](Kind k) {
        const Scenario sc(make_spec(k, 1.0, 20000));
        return classify_kind(sc, 1.0, 20000, 0.99, 2026).cell;
    };
    CHECK(cell(Kind::Kind1) == MarketKindCell::First);
    CHECK(cell(Kind::Kind2Canonical) == MarketKindCell::Second);
    CHECK(cell(Kind::Kind3Hyper) == MarketKindCell::Third);
    CHECK(cell(Kind::Kind4Composite) == MarketKindCell::Fourth);
    CHECK(cell(Kind::PureIlliquidity) == MarketKindCell::Second);
    CHECK(std::string(premium_sign_prediction(MarketKindCell::Second)) == "non-negative");
}

TEST_CASE("kind2 defect estimate matches the closed form") {
    const Scenario sc(make_spec(Kind::Kind2Canonical, 1.0, 100000));
    const auto cls = classify_kind(sc, 1.0, 100000, 0.99, 31);
    CHECK(cls.z_test.verdict == Verdict::StrictLocal);
    CHECK(std::abs(cls.z_test.defect - 2.0 * normal_cdf(-1.0)) <=
          4.0 * cls.z_test.sample.stderr_);
    CHECK(cls.pb_test.verdict == Verdict::TrueMartingale);
}

TEST_SUITE_END();
