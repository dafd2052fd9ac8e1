#include <doctest.h>

#include <cmath>
#include <vector>

#include "illiq/rng.hpp"
#include "illiq/stats.hpp"

using namespace illiq;

TEST_SUITE_BEGIN("rng");

TEST_CASE("philox4x64-10 keystream matches the reference function") {
    // Vectors cross-checked against numpy.random.Philox, which produces
    // philox(counter + 1, key) for its configured counter.
    const auto zero = rng::philox4x64({0, 0, 0, 0}, {0, 0});
    CHECK(zero[0] == 0x16554d9eca36314cull);
    CHECK(zero[1] == 0xdb20fe9d672d0fdcull);
    CHECK(zero[2] == 0xd7e772cee186176bull);
    CHECK(zero[3] == 0x7e68b68aec7ba23bull);

    const auto pi = rng::philox4x64(
        {0x243f6a8885a308d3ull, 0x13198a2e03707344ull, 0xa4093822299f31d0ull,
         0x082efa98ec4e6c89ull},
        {0x452821e638d01377ull, 0xbe5466cf34e90c6cull});
    CHECK(pi[0] == 0xa528f45403e61d95ull);
    CHECK(pi[1] == 0x38c72dbd566e9788ull);
    CHECK(pi[2] == 0xa5a1610e72fd18b5ull);
    CHECK(pi[3] == 0x57bd43b5e52b7fe6ull);

    // Block 1 of the (42, 7) stream equals numpy at counter zero.
    rng::PathStream s(42, 7);
    for (int i = 0; i < 4; ++i) (void)s.next_u64();
    CHECK(s.next_u64() == 0xa64064f34e84b9a3ull);
    CHECK(s.next_u64() == 0xe287959a866a08fdull);
    CHECK(s.next_u64() == 0x8dc181f009b96c03ull);
    CHECK(s.next_u64() == 0xf3f6001d4fa83454ull);
}

TEST_CASE("streams replay bit-identically and do not collide") {
    rng::PathStream a(123, 5), b(123, 5), c(123, 6);
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 256; ++i) {
        const auto x = a.next_u64();
        all_equal = all_equal && (x == b.next_u64());
        any_diff = any_diff || (x != c.next_u64());
    }
    CHECK(all_equal);
    CHECK(any_diff);
}

TEST_CASE("uniforms live in the open unit interval") {
    rng::PathStream s(7, 0);
    double lo = 1.0, hi = 0.0, sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = s.next_uniform();
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        sum += u;
    }
    CHECK(lo > 0.0);
    CHECK(hi < 1.0);
    CHECK(std::abs(sum / n - 0.5) < 4.0 * 0.2887 / std::sqrt(double(n)));
}

TEST_CASE("gaussian moments") {
    rng::PathStream s(11, 3);
    const std::size_t n = 200000;
    std::vector<double> x(n);
    for (auto& v : x) v = s.next_gaussian();
    const MCEstimate m = mc_mean(x);
    CHECK(std::abs(m.mean) < 4.0 * m.stderr_);
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) sq[i] = x[i] * x[i];
    const MCEstimate v = mc_mean(sq);
    CHECK(std::abs(v.mean - 1.0) < 4.0 * v.stderr_);
}

TEST_CASE("poisson mean and variance at small and large intensity") {
    for (const double lambda : {3.0, 256.0}) {
        rng::PathStream s(99, static_cast<std::uint64_t>(lambda));
        const std::size_t n = 100000;
        std::vector<double> x(n);
        for (auto& v : x) v = static_cast<double>(s.next_poisson(lambda));
        const MCEstimate m = mc_mean(x);
        CHECK(std::abs(m.mean - lambda) < 4.0 * m.stderr_);
        std::vector<double> sq(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double d = x[i] - lambda;
            sq[i] = d * d;
        }
        const MCEstimate v = mc_mean(sq);
        CHECK(std::abs(v.mean - lambda) < 4.0 * v.stderr_);
    }
}

TEST_CASE("gamma mean and variance") {
    rng::PathStream s(5, 1);
    const double shape = 5.0;
    const std::size_t n = 100000;
    std::vector<double> x(n);
    for (auto& v : x) v = s.next_gamma(shape);
    const MCEstimate m = mc_mean(x);
    CHECK(std::abs(m.mean - shape) < 4.0 * m.stderr_);
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - shape;
        sq[i] = d * d;
    }
    const MCEstimate v = mc_mean(sq);
    CHECK(std::abs(v.mean - shape) < 4.0 * v.stderr_);
}

TEST_SUITE_END();
