#include <doctest.h>

#include <cmath>
#include <initializer_list>
#include <stdexcept>

#include "illiq/math.hpp"

using namespace illiq;

namespace {

// Independent high-precision oracle: Taylor series of erf in long
// double via the confluent form, which has positive terms only.
//   erf(z) = 2/sqrt(pi) e^{-z^2} sum_k 2^k z^{2k+1} / (1*3*...*(2k+1))
long double erf_reference(long double z) {
    const long double two_over_sqrt_pi = 1.1283791670955125738961589031215L;
    const long double z2 = z * z;
    long double term = z;
    long double sum = z;
    for (int k = 1; k < 400; ++k) {
        term *= 2.0L * z2 / (2.0L * k + 1.0L);
        sum += term;
        if (term < 1e-25L * sum) break;
    }
    return two_over_sqrt_pi * std::exp(-z2) * sum;
}

long double phi_reference(long double x) {
    if (x >= 0) return 0.5L + 0.5L * erf_reference(x / 1.4142135623730950488L);
    return 0.5L - 0.5L * erf_reference(-x / 1.4142135623730950488L);
}

}  // namespace

TEST_SUITE_BEGIN("math");

TEST_CASE("normal cdf basics") {
    CHECK(normal_cdf(0.0) == 0.5);
    CHECK(std::abs(normal_cdf(-1.0) - 0.1586552539) <= 1e-10);
    for (const double x : {0.5, 1.0, 2.0}) {
        CHECK(std::abs(normal_cdf(x) + normal_cdf(-x) - 1.0) < 1e-15);
    }
}

TEST_CASE("normal cdf vs high-precision series oracle") {
    // The series oracle is trustworthy up to |x| ~ 8; the tail beyond is
    // below 1e-15 in absolute terms anyway.
    double max_err = 0.0;
    for (double x = -8.0; x <= 8.0; x += 0.125) {
        max_err = std::max(max_err,
                           std::abs(normal_cdf(x) - static_cast<double>(phi_reference(x))));
    }
    CHECK(max_err <= 1e-12);
}

TEST_CASE("inverse normal cdf against frozen high-precision values") {
    struct Case {
        double p, x;
    };
    // mpmath (40 digits), rounded to double.
    const Case cases[] = {
        {1e-15, -7.941345326170996781},
        {1e-10, -6.361340902404056205},
        {1e-4, -3.719016485455680564},
        {0.025, -1.959963984540054236},
        {0.31731050786291410, -0.4752328492470835866},
        {0.5, 0.0},
        {0.75, 0.6744897501960817432},
        {0.9986501019683699, 3.0},
    };
    for (const auto& c : cases) {
        CHECK(std::abs(inverse_normal_cdf(c.p) - c.x) <= 1e-12 * std::max(1.0, std::abs(c.x)));
    }
    CHECK_THROWS_AS((void)inverse_normal_cdf(0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)inverse_normal_cdf(1.0), std::invalid_argument);
}

TEST_CASE("round trips") {
    // The complementary tail beyond |x| ~ 5.5 loses accuracy to the
    // double representation of p near 1, not to the approximations.
    for (double x = -5.5; x <= 5.5; x += 0.37) {
        CHECK(std::abs(inverse_normal_cdf(normal_cdf(x)) - x) < 1e-9);
    }
    CHECK(normal_two_sided_quantile(0.95) == doctest::Approx(1.959963984540054).epsilon(1e-12));
}

TEST_CASE("normal pdf") {
    CHECK(normal_pdf(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-14));
    CHECK(normal_pdf(1.0) == doctest::Approx(0.24197072451914337).epsilon(1e-13));
}

TEST_SUITE_END();
