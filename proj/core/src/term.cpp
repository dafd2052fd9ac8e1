#include "illiq/term.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "illiq/report.hpp"

namespace illiq {

namespace {

std::vector<double> pre_default_subset(const MarketPaths& m, std::size_t t_index,
                                       const std::vector<double>& values) {
    std::vector<double> out;
    out.reserve(values.size());
    for (std::size_t p = 0; p < values.size(); ++p) {
        if (m.tau().alive_at(p, t_index)) out.push_back(values[p]);
    }
    if (out.size() < 2) {
        throw std::runtime_error("term: fewer than two pre-default paths at the requested t");
    }
    return out;
}

}  // namespace

TwoPriceEngine::TwoPriceEngine(const Scenario& sc, const std::vector<double>& marks,
                               std::size_t n_paths, std::uint64_t seed, unsigned threads)
    : scenario_(&sc) {
    std::vector<double> times = marks;
    times.push_back(0.0);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    const TimeGrid grid = TimeGrid::from_times(std::move(times));
    q_run_ = sc.simulate(Measure::Q, grid, n_paths, seed, threads);
    qcheck_run_ = sc.simulate(Measure::Qcheck, grid, n_paths, seed + 1, threads);
}

MCEstimate TwoPriceEngine::market_price(double t, double T) const {
    if (t > T) throw std::invalid_argument("market_price: t must not exceed T");
    const auto values = scenario_->q_price(q_run_, t, T);
    for (std::size_t p = 0; p < values.size(); ++p) {
        if (!(q_run_.s_at(p, q_run_.grid.index_of(t)) > 0.0)) {
            throw std::runtime_error("market_price: vanishing recovery rate");
        }
    }
    return mc_mean(values);
}

MCEstimate TwoPriceEngine::liquidity_adjusted_price(double t, double T) const {
    if (t > T) throw std::invalid_argument("liquidity_adjusted_price: t must not exceed T");
    const std::size_t it = qcheck_run_.grid.index_of(t);
    if (t == 0.0) {
        // Direct Monte Carlo over realized discount factors.
        return mc_mean(scenario_->discount_factor(qcheck_run_, 0.0, T));
    }
    const auto values = scenario_->qcheck_price(qcheck_run_, t, T);
    return mc_mean(pre_default_subset(qcheck_run_, it, values));
}

MCEstimate TwoPriceEngine::recovery(double t) const {
    const std::size_t it = qcheck_run_.grid.index_of(t);
    std::vector<double> s(qcheck_run_.n_paths);
    for (std::size_t p = 0; p < s.size(); ++p) s[p] = qcheck_run_.s_at(p, it);
    return mc_mean(pre_default_subset(qcheck_run_, it, s));
}

MCEstimate TwoPriceEngine::illiquidity_premium(double t, double T) const {
    if (t > T) throw std::invalid_argument("illiquidity_premium: t must not exceed T");
    const std::size_t it = qcheck_run_.grid.index_of(t);
    std::vector<double> l(qcheck_run_.n_paths);
    if (t == 0.0) {
        const double q0 = scenario_->q0(T);
        const auto df = scenario_->discount_factor(qcheck_run_, 0.0, T);
        for (std::size_t p = 0; p < l.size(); ++p) {
            l[p] = qcheck_run_.s_at(p, 0) * (df[p] - q0);
        }
        return mc_mean(l);
    }
    const auto qc = scenario_->qcheck_price(qcheck_run_, t, T);
    const auto q = scenario_->q_price(qcheck_run_, t, T);
    for (std::size_t p = 0; p < l.size(); ++p) {
        l[p] = qcheck_run_.s_at(p, it) * (qc[p] - q[p]);
    }
    return mc_mean(pre_default_subset(qcheck_run_, it, l));
}

MCEstimate TwoPriceEngine::illiquidity_factor(double t, double T) const {
    const MCEstimate q = market_price(t, T);
    const MCEstimate qc = liquidity_adjusted_price(t, T);
    if (!(qc.mean > 0.0)) {
        throw std::runtime_error("illiquidity_factor: non-positive liquidity-adjusted price");
    }
    MCEstimate xi;
    xi.mean = q.mean / qc.mean;
    // First-order propagation for the ratio of two independent-run means.
    const double a = q.stderr_ / qc.mean;
    const double b = q.mean * qc.stderr_ / (qc.mean * qc.mean);
    xi.stderr_ = std::sqrt(a * a + b * b);
    xi.n = std::min(q.n, qc.n);
    xi.ci_level = q.ci_level;
    return xi;
}

MCEstimate TwoPriceEngine::market_price_payoff_mc(double T) const {
    if (!scenario_->pb_true_martingale()) {
        throw std::invalid_argument(
            "market_price_payoff_mc: discounted bond leg is not a true martingale");
    }
    const std::size_t iT = q_run_.grid.index_of(T);
    std::vector<double> v(q_run_.n_paths);
    for (std::size_t p = 0; p < v.size(); ++p) {
        v[p] = q_run_.s_at(p, iT) / (q_run_.b_at(p, iT) * q_run_.s_at(p, 0));
    }
    return mc_mean(v);
}

MCEstimate TwoPriceEngine::qcheck_shortcut(double T) const {
    const std::size_t iT = q_run_.grid.index_of(T);
    std::vector<double> q0(q_run_.n_paths, scenario_->q0(T));
    const auto z = q_run_.density.z_slice(iT);
    return ratio_of_means(q0, {z.data(), z.size()});
}

MCEstimate TwoPriceEngine::qcheck_survival_conditional(double T) const {
    const std::size_t iT = qcheck_run_.grid.index_of(T);
    const auto df = scenario_->discount_factor(qcheck_run_, 0.0, T);
    std::vector<double> num(df.size()), den(df.size());
    for (std::size_t p = 0; p < df.size(); ++p) {
        const bool alive = qcheck_run_.tau().alive_at(p, iT);
        num[p] = alive ? df[p] : 0.0;
        den[p] = alive ? 1.0 : 0.0;
    }
    return ratio_of_means(num, den);
}

PremiumRow TwoPriceEngine::row(double t, double T) const {
    PremiumRow r;
    r.t = t;
    r.T = T;
    r.q = market_price(t, T);
    r.qcheck = liquidity_adjusted_price(t, T);
    r.s = recovery(t);
    r.premium = illiquidity_premium(t, T);
    r.xi = illiquidity_factor(t, T);
    r.n_paths = qcheck_run_.n_paths;

    // Heavy-tail warning heuristic on the premium samples at t = 0.
    if (t == 0.0) {
        const double q0 = scenario_->q0(T);
        auto df = scenario_->discount_factor(qcheck_run_, 0.0, T);
        for (auto& v : df) v -= q0;
        r.premium_kurtosis = excess_kurtosis(df);
    }
    return r;
}

PremiumSurface TwoPriceEngine::surface(const std::vector<double>& t_list,
                                       const std::vector<double>& T_list) const {
    PremiumSurface s;
    for (double t : t_list) {
        for (double T : T_list) {
            if (t <= T) s.rows.push_back(row(t, T));
        }
    }
    return s;
}

std::string PremiumSurface::to_csv() const {
    std::ostringstream os;
    os << "t,T,Q_mean,Q_se,Qcheck_mean,Qcheck_se,S_mean,L_mean,L_se,Xi_mean,Xi_se,n_paths\n";
    for (const auto& r : rows) {
        os << fmt_double(r.t) << ',' << fmt_double(r.T) << ',' << fmt_double(r.q.mean) << ','
           << fmt_double(r.q.stderr_) << ',' << fmt_double(r.qcheck.mean) << ','
           << fmt_double(r.qcheck.stderr_) << ',' << fmt_double(r.s.mean) << ','
           << fmt_double(r.premium.mean) << ',' << fmt_double(r.premium.stderr_) << ','
           << fmt_double(r.xi.mean) << ',' << fmt_double(r.xi.stderr_) << ',' << r.n_paths
           << '\n';
    }
    return os.str();
}

ForwardWeights TwoPriceEngine::forward_measure_weights(double t, double T) const {
    if (!scenario_->pb_true_martingale()) {
        throw std::invalid_argument(
            "forward_measure_weights: needs a true-martingale discounted bond leg "
            "(models of the 1st or 2nd kind)");
    }
    if (t > T) throw std::invalid_argument("forward_measure_weights: t must not exceed T");
    const std::size_t it = qcheck_run_.grid.index_of(t);
    const std::size_t n = qcheck_run_.n_paths;
    const double qcheck0 = scenario_->qcheck0_closed(T);

    ForwardWeights w;
    const auto q = scenario_->q_price(qcheck_run_, t, T);
    const auto qc = scenario_->qcheck_price(qcheck_run_, t, T);
    w.qcheckT.resize(n);
    w.xi_t.resize(n);
    for (std::size_t p = 0; p < n; ++p) {
        const bool alive = qcheck_run_.tau().alive_at(p, it);
        if (alive) {
            w.qcheckT[p] = qcheck_run_.density.zcheck_at(p, it) * qc[p] / qcheck0;
        } else {
            // Replacement-account branch of the T-bond numeraire.
            w.qcheckT[p] =
                scenario_->post_default_value(0.0, t) * scenario_->post_default_value(t, T) /
                qcheck0;
        }
        w.xi_t[p] = (alive && qc[p] > 0.0) ? q[p] / qc[p] : 0.0;
    }

    const double xi0 = scenario_->q0(T) / qcheck0;
    w.qtildeT.resize(n);
    for (std::size_t p = 0; p < n; ++p) w.qtildeT[p] = w.qcheckT[p] * w.xi_t[p] / xi0;
    return w;
}

MCEstimate TwoPriceEngine::xi_forward_weighted(double t, double T) const {
    const ForwardWeights w = forward_measure_weights(t, T);
    return mc_mean_product(w.qcheckT, w.xi_t);
}

MCEstimate TwoPriceEngine::discounted_bond_mean(double t, double T) const {
    const std::size_t it = qcheck_run_.grid.index_of(t);
    const auto q = scenario_->q_price(qcheck_run_, t, T);
    std::vector<double> v(q.size());
    for (std::size_t p = 0; p < q.size(); ++p) {
        // Q(t,T) vanishes on post-default states, where Bcheck is not
        // tracked; the product is zero there.
        v[p] = (q[p] == 0.0) ? 0.0 : q[p] / qcheck_run_.bcheck_at(p, it);
    }
    return mc_mean(v);
}

Kind4BoundsReport TwoPriceEngine::kind4_bounds_check(double t, double T) const {
    Kind4BoundsReport rep;
    const std::size_t it = q_run_.grid.index_of(t);
    auto lb = scenario_->lower_bound(q_run_, t, T);
    rep.lower = mc_mean(pre_default_subset(q_run_, it, lb));
    rep.q = market_price(t, T);
    rep.qcheck = liquidity_adjusted_price(t, T);
    const double bound = std::min(rep.q.mean, rep.qcheck.mean);
    const double joint =
        std::sqrt(rep.lower.stderr_ * rep.lower.stderr_ +
                  std::max(rep.q.stderr_, rep.qcheck.stderr_) *
                      std::max(rep.q.stderr_, rep.qcheck.stderr_));
    rep.holds = rep.lower.mean <= bound + 4.0 * joint;
    std::ostringstream os;
    os << "lower=" << rep.lower.mean << " (se " << rep.lower.stderr_ << "), Q=" << rep.q.mean
       << ", Qcheck=" << rep.qcheck.mean << ", bound holds: " << (rep.holds ? "yes" : "no");
    rep.detail = os.str();
    return rep;
}

}  // namespace illiq
