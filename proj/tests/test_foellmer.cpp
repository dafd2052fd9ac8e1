#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <vector>

#include "illiq/foellmer.hpp"
#include "illiq/math.hpp"
#include "illiq/paths.hpp"

using namespace illiq;

namespace {

constexpr std::size_t kN = 100000;

GeneralizedDensity bes3_density(const TimeGrid& g, std::uint64_t seed, std::size_t n = kN) {
    const PathSet x = simulate_bes3(g, 1.0, n, seed);
    PathSet z = x;
    for (auto& v : z.data) v = 1.0 / v;
    return density_from_q_deflator(z);
}

GeneralizedDensity stopped_density(const TimeGrid& g, std::uint64_t seed, std::size_t n = kN) {
    const auto res = simulate_stopped_bm(g, 1.0, n, seed, 0, true);
    return density_from_qcheck_martingale(res.paths, res.absorption);
}

}  // namespace

TEST_SUITE_BEGIN("foellmer");

TEST_CASE("builders enforce the unit start and the inverse relation") {
    const TimeGrid g = TimeGrid::from_times({0.0, 0.5, 1.0});
    const auto dq = bes3_density(g, 1, 500);
    const auto dc = stopped_density(g, 2, 500);
    for (std::size_t p = 0; p < 500; ++p) {
        CHECK(dq.z_at(p, 0) == 1.0);
        CHECK(dc.zcheck_at(p, 0) == 1.0);
        for (std::size_t i = 0; i < g.size(); ++i) {
            // Zcheck = (1/Z) 1{tau>t} and 0 otherwise, pointwise.
            if (dc.tau.alive_at(p, i)) {
                CHECK(dc.zcheck_at(p, i) == doctest::Approx(1.0 / dc.z_at(p, i)));
            } else {
                CHECK(dc.zcheck_at(p, i) == 0.0);
                CHECK(dc.z_at(p, i) == 0.0);
            }
        }
    }
}

TEST_CASE("expectations under Q from Qcheck samples") {
    const TimeGrid g = TimeGrid::from_times({0.0, 1.0});
    const auto d = stopped_density(g, 11);

    // H = 1: the density has unit mean.
    const std::vector<double> ones(d.n_paths, 1.0);
    const MCEstimate unit = expectation_under_Q(d, 1.0, ones);
    CHECK(std::abs(unit.mean - 1.0) <= 3.0 * unit.stderr_);

    // H = 1{tau <= 1}: exactly zero on every path.
    std::vector<double> ind(d.n_paths);
    for (std::size_t p = 0; p < d.n_paths; ++p) ind[p] = d.tau.alive_at(p, 1) ? 0.0 : 1.0;
    const MCEstimate zero = expectation_under_Q(d, 1.0, ind);
    CHECK(zero.mean == 0.0);
    CHECK(zero.stderr_ == 0.0);

    // H = Z_1 reproduces E_Q[Z_1] = 1 - 2 Phi(-1).
    std::vector<double> z1(d.n_paths);
    for (std::size_t p = 0; p < d.n_paths; ++p) z1[p] = d.z_at(p, 1);
    const MCEstimate ez = expectation_under_Q(d, 1.0, z1);
    CHECK(std::abs(ez.mean - (1.0 - 2.0 * normal_cdf(-1.0))) <= 3.0 * ez.stderr_);

    CHECK_THROWS_AS((void)expectation_under_Q(d, 0.33, ones), std::invalid_argument);
}

TEST_CASE("expectations under Qcheck from Q samples") {
    const TimeGrid g = TimeGrid::from_times({0.0, 1.0});
    const auto d = bes3_density(g, 12);
    const std::vector<double> ones(d.n_paths, 1.0);

    const MCEstimate surv = expectation_under_Qcheck_pre_tau(d, 1.0, ones);
    CHECK(std::abs(surv.mean - (1.0 - 2.0 * normal_cdf(-1.0))) <= 3.0 * surv.stderr_);

    const MCEstimate at0 = expectation_under_Qcheck_pre_tau(d, 0.0, ones);
    CHECK(at0.mean == 1.0);
    CHECK(at0.stderr_ == 0.0);
}

TEST_CASE("true-martingale deflator keeps unit mass at every time") {
    // Geometric Brownian martingale Z = exp(s W - s^2 t / 2).
    const TimeGrid g = TimeGrid::from_times({0.0, 0.5, 1.0, 2.0});
    const double vol = 0.6;
    const PathSet w = simulate_bm(g, 1, kN, 13);
    PathSet z = w;
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::size_t p = 0; p < kN; ++p) {
            z.value(p, i) = std::exp(vol * w.value(p, i) - 0.5 * vol * vol * g[i]);
        }
    }
    const auto d = density_from_q_deflator(z);
    const std::vector<double> ones(kN, 1.0);
    for (const double t : {0.5, 1.0, 2.0}) {
        const MCEstimate m = expectation_under_Qcheck_pre_tau(d, t, ones);
        CHECK(std::abs(m.mean - 1.0) <= 3.0 * m.stderr_);
    }
    // Perfect liquidity: no explosion mass and unit deflator mean.
    for (const double t : {1.0, 2.0}) {
        const MCEstimate cdf = explosion_cdf(d, t);
        CHECK(std::abs(cdf.mean) <= 4.0 * cdf.stderr_);
    }
}

TEST_CASE("explosion-time distribution via both routes") {
    const TimeGrid g = TimeGrid::from_times({0.0, 0.25, 1.0, 4.0});
    const auto dq = bes3_density(g, 21);
    const auto dc = stopped_density(g, 22);

    const MCEstimate zero = explosion_cdf(dc, 0.0);
    CHECK(zero.mean == 0.0);

    const MCEstimate direct = explosion_cdf(dc, 1.0);
    CHECK(std::abs(direct.mean - 2.0 * normal_cdf(-1.0)) <= 3.0 * direct.stderr_);

    for (const double T : {0.25, 1.0, 4.0}) {
        const MCEstimate a = explosion_cdf(dc, T);
        const MCEstimate b = explosion_cdf(dq, T);
        const double joint = std::hypot(a.stderr_, b.stderr_);
        CHECK(std::abs(a.mean - b.mean) <= 4.0 * joint);
    }
}

TEST_CASE("duality round trip for a bounded functional") {
    const TimeGrid g = TimeGrid::from_times({0.0, 0.5, 1.0});
    const auto dq = bes3_density(g, 31);
    const auto dc = stopped_density(g, 32);
    const std::size_t i = g.index_of(1.0);

    // H = min(X_1, 2) evaluated on the traded leg (Zcheck).
    std::vector<double> h_q(dq.n_paths), one_q(dq.n_paths, 1.0);
    for (std::size_t p = 0; p < dq.n_paths; ++p) h_q[p] = std::min(dq.zcheck_at(p, i), 2.0);
    const MCEstimate direct = mc_mean(h_q);

    std::vector<double> h_c(dc.n_paths);
    for (std::size_t p = 0; p < dc.n_paths; ++p) h_c[p] = std::min(dc.zcheck_at(p, i), 2.0);
    const MCEstimate via_qcheck = expectation_under_Q(dc, 1.0, h_c);

    const double joint = std::hypot(direct.stderr_, via_qcheck.stderr_);
    CHECK(std::abs(direct.mean - via_qcheck.mean) <= 4.0 * joint);
}

TEST_CASE("supermartingale defect is monotone and Zcheck keeps unit mean") {
    const TimeGrid g = TimeGrid::from_times({0.0, 0.25, 0.5, 1.0, 2.0});
    const auto dq = bes3_density(g, 41);
    double prev_mean = 1.0;
    double prev_se = 0.0;
    for (std::size_t i = 1; i < g.size(); ++i) {
        const auto z = dq.z_slice(i);
        const MCEstimate m = mc_mean({z.data(), z.size()});
        CHECK(m.mean <= prev_mean + 4.0 * std::hypot(m.stderr_, prev_se));
        prev_mean = m.mean;
        prev_se = m.stderr_;
    }

    const auto dc = stopped_density(g, 42);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto zc = dc.zcheck_slice(i);
        const MCEstimate m = mc_mean({zc.data(), zc.size()});
        CHECK(std::abs(m.mean - 1.0) <= 4.0 * m.stderr_ + 1e-12);
    }
}

TEST_CASE("generalized Bayes conditional via nested restarts") {
    // Outer paths pinned at Zcheck = 1 so the closed form
    // 1 - 2 Phi(-sqrt(2)) is the exact conditional at (t, T) = (0.5, 1).
    const TimeGrid g = TimeGrid::from_times({0.0, 0.5, 1.0});
    PathSet pinned;
    pinned.grid = g;
    pinned.n_paths = 8;
    pinned.measure = Measure::Qcheck;
    pinned.data.assign(g.size() * pinned.n_paths, 1.0);
    AbsorptionInfo no_absorption;
    no_absorption.tau_index.assign(pinned.n_paths, AbsorptionInfo::kNever);
    no_absorption.tau_time.assign(pinned.n_paths, 1e300);
    const auto d = density_from_qcheck_martingale(pinned, no_absorption);

    const std::size_t n_inner = 1 << 14;
    const NestedDeflatorSampler sampler = [](std::size_t, rng::PathStream& gen) {
        // One exact Bessel(3) step from X = 1 over dt = 0.5 under Q.
        const double sdt = std::sqrt(0.5);
        const double y0 = 1.0 + sdt * gen.next_gaussian();
        const double y1 = sdt * gen.next_gaussian();
        const double y2 = sdt * gen.next_gaussian();
        return 1.0 / std::sqrt(y0 * y0 + y1 * y1 + y2 * y2);
    };
    const auto values = bayes_conditional(d, 0.5, 1.0, sampler, n_inner, 777);
    const double ref = 1.0 - 2.0 * normal_cdf(-std::sqrt(2.0));
    // Inner-sample standard error of a bounded-by-one ratio.
    const double inner_se = 0.5 / std::sqrt(static_cast<double>(n_inner));
    for (const double v : values) CHECK(std::abs(v - ref) <= 4.0 * inner_se);

    // At t = 0 the conditional reduces to the survival probability over
    // the full horizon.
    const NestedDeflatorSampler sampler0 = [](std::size_t, rng::PathStream& gen) {
        const double y0 = 1.0 + gen.next_gaussian();
        const double y1 = gen.next_gaussian();
        const double y2 = gen.next_gaussian();
        return 1.0 / std::sqrt(y0 * y0 + y1 * y1 + y2 * y2);
    };
    const auto at0 = bayes_conditional(d, 0.0, 1.0, sampler0, n_inner, 778);
    const double ref0 = 1.0 - 2.0 * normal_cdf(-1.0);
    for (const double v : at0) CHECK(std::abs(v - ref0) <= 4.0 * inner_se);

    // Degenerate conditioning at t = T returns H 1{tau > T} exactly.
    std::vector<double> h(pinned.n_paths, 0.625);
    const auto at_T = bayes_conditional(d, 1.0, 1.0, sampler, 1, 0, h);
    for (const double v : at_T) CHECK(v == 0.625);
}

TEST_SUITE_END();
