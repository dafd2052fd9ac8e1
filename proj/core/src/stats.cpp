#include "illiq/stats.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "illiq/math.hpp"

namespace illiq {

double MCEstimate::half_width() const {
    return normal_two_sided_quantile(ci_level) * stderr_;
}

double pairwise_sum(std::span<const double> xs) {
    if (xs.size() <= 32) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

MCEstimate mc_mean(std::span<const double> xs, double ci_level) {
    if (xs.size() < 2) throw std::invalid_argument("mc_mean: need at least 2 samples");
    const auto n = static_cast<double>(xs.size());
    const double mean = pairwise_sum(xs) / n;

    std::vector<double> sq(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double d = xs[i] - mean;
        sq[i] = d * d;
    }
    const double var = pairwise_sum(sq) / (n - 1.0);
    MCEstimate e;
    e.mean = mean;
    e.stderr_ = std::sqrt(var / n);
    e.n = xs.size();
    e.ci_level = ci_level;
    return e;
}

MCEstimate mc_mean_product(std::span<const double> a, std::span<const double> b,
                           double ci_level) {
    if (a.size() != b.size()) throw std::invalid_argument("mc_mean_product: size mismatch");
    std::vector<double> prod(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) prod[i] = a[i] * b[i];
    return mc_mean(prod, ci_level);
}

MCEstimate ratio_of_means(std::span<const double> num, std::span<const double> den,
                          double ci_level) {
    if (num.size() != den.size()) throw std::invalid_argument("ratio_of_means: size mismatch");
    if (num.size() < 2) throw std::invalid_argument("ratio_of_means: need at least 2 samples");
    const auto n = static_cast<double>(num.size());
    const double mn = pairwise_sum(num) / n;
    const double md = pairwise_sum(den) / n;
    if (md == 0.0) throw std::invalid_argument("ratio_of_means: zero denominator mean");

    std::vector<double> vn(num.size()), vd(num.size()), vc(num.size());
    for (std::size_t i = 0; i < num.size(); ++i) {
        const double dn = num[i] - mn;
        const double dd = den[i] - md;
        vn[i] = dn * dn;
        vd[i] = dd * dd;
        vc[i] = dn * dd;
    }
    const double var_n = pairwise_sum(vn) / (n - 1.0);
    const double var_d = pairwise_sum(vd) / (n - 1.0);
    const double cov = pairwise_sum(vc) / (n - 1.0);

    const double r = mn / md;
    // First-order delta method for f(x,y) = x/y.
    const double var_r =
        (var_n - 2.0 * r * cov + r * r * var_d) / (md * md);
    MCEstimate e;
    e.mean = r;
    e.stderr_ = std::sqrt(std::max(0.0, var_r) / n);
    e.n = num.size();
    e.ci_level = ci_level;
    return e;
}

std::vector<double> antithetic_pair_means(std::span<const double> xs) {
    if (xs.size() < 2 || (xs.size() & 1)) {
        throw std::invalid_argument("antithetic_pair_means: need an even sample count");
    }
    std::vector<double> out(xs.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = 0.5 * (xs[2 * i] + xs[2 * i + 1]);
    }
    return out;
}

double excess_kurtosis(std::span<const double> xs) {
    if (xs.size() < 4) return 0.0;
    const auto n = static_cast<double>(xs.size());
    const double mean = pairwise_sum(xs) / n;
    double m2 = 0.0, m4 = 0.0;
    for (double x : xs) {
        const double d = x - mean;
        const double d2 = d * d;
        m2 += d2;
        m4 += d2 * d2;
    }
    m2 /= n;
    m4 /= n;
    if (m2 == 0.0) return 0.0;
    return m4 / (m2 * m2) - 3.0;
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::TrueMartingale: return "TrueMartingale";
        case Verdict::StrictLocal: return "StrictLocal";
        default: return "Inconclusive";
    }
}

DefectTest defect_test(std::span<const double> samples, double claimed_mean, double confidence,
                       bool closed_form_confirmed) {
    DefectTest t;
    t.claimed_mean = claimed_mean;
    t.confidence = confidence;
    t.closed_form_confirmed = closed_form_confirmed;
    t.sample = mc_mean(samples, confidence);
    t.defect = claimed_mean - t.sample.mean;

    if (samples.size() < 100) {
        t.verdict = Verdict::Inconclusive;  // minimum-n guard
        return t;
    }
    if (t.sample.stderr_ == 0.0) {
        t.z_statistic = (t.defect == 0.0) ? 0.0 : std::copysign(1e300, t.defect);
        t.p_value = (t.defect > 0.0) ? 0.0 : 1.0;
    } else {
        t.z_statistic = t.defect / t.sample.stderr_;
        t.p_value = normal_cdf(-t.z_statistic);
    }
    const double z_crit = inverse_normal_cdf(confidence);
    if (t.z_statistic > z_crit) {
        t.verdict = Verdict::StrictLocal;
    } else {
        t.verdict = closed_form_confirmed ? Verdict::TrueMartingale : Verdict::Inconclusive;
    }
    return t;
}

}  // namespace illiq
