#include "illiq/rng.hpp"

#include <cmath>

#include "illiq/math.hpp"

namespace illiq::rng {

namespace {

constexpr std::uint64_t kPhiloxM0 = 0xD2E7470EE14C6C93ull;
constexpr std::uint64_t kPhiloxM1 = 0xCA5A826395121157ull;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73Bull;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
    const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
}

inline void round_once(std::array<std::uint64_t, 4>& c, const std::array<std::uint64_t, 2>& k) {
    std::uint64_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, c[0], hi0, lo0);
    mulhilo(kPhiloxM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

std::array<std::uint64_t, 4> philox4x64(const std::array<std::uint64_t, 4>& counter,
                                        const std::array<std::uint64_t, 2>& key) {
    std::array<std::uint64_t, 4> c = counter;
    std::array<std::uint64_t, 2> k = key;
    for (int r = 0; r < 10; ++r) {
        if (r > 0) {
            k[0] += kWeyl0;
            k[1] += kWeyl1;
        }
        round_once(c, k);
    }
    return c;
}

std::uint64_t mix64(std::uint64_t x) {
    // splitmix64 finalizer
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

void PathStream::refill() {
    buf_ = philox4x64({block_, 0, 0, 0}, key_);
    ++block_;
    pos_ = 0;
}

std::uint64_t PathStream::next_u64() {
    if (pos_ >= 4) refill();
    return buf_[pos_++];
}

double PathStream::next_uniform() {
    // 53-bit mantissa, shifted into the open interval.
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

double PathStream::next_gaussian() {
    return inverse_normal_cdf(next_uniform());
}

std::uint64_t PathStream::next_poisson(double lambda) {
    if (lambda <= 0.0) return 0;
    if (lambda < 10.0) {
        // inversion by multiplication
        const double l = std::exp(-lambda);
        std::uint64_t k = 0;
        double p = next_uniform();
        while (p > l) {
            ++k;
            p *= next_uniform();
        }
        return k;
    }
    // PTRS transformed rejection (Hormann 1993).
    const double b = 0.931 + 2.53 * std::sqrt(lambda);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_lambda = std::log(lambda);
    for (;;) {
        const double u = next_uniform() - 0.5;
        const double v = next_uniform();
        const double us = 0.5 - std::abs(u);
        const double kf = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
            kf * log_lambda - lambda - std::lgamma(kf + 1.0)) {
            return static_cast<std::uint64_t>(kf);
        }
    }
}

double PathStream::next_gamma(double shape) {
    // Marsaglia-Tsang squeeze; valid for shape >= 1.
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = next_gaussian();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = next_uniform();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

}  // namespace illiq::rng
