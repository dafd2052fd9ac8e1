// Two-price term structure machinery: market prices, liquidity-adjusted
// prices, illiquidity premium and factor, forward-measure reweighting.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "illiq/scenario.hpp"
#include "illiq/stats.hpp"

namespace illiq {

struct PremiumRow {
    double t = 0.0;
    double T = 0.0;
    MCEstimate q;        // market price Q(t,T)
    MCEstimate qcheck;   // liquidity-adjusted price
    MCEstimate s;        // recovery rate S_t
    MCEstimate premium;  // L(t,T) = S_t (Qcheck - Q)
    MCEstimate xi;       // illiquidity factor Q / Qcheck
    std::size_t n_paths = 0;
    double premium_kurtosis = 0.0;  // integrability warning heuristic
};

struct PremiumSurface {
    std::vector<PremiumRow> rows;

    // Exact column set:
    // t,T,Q_mean,Q_se,Qcheck_mean,Qcheck_se,S_mean,L_mean,L_se,Xi_mean,Xi_se,n_paths
    std::string to_csv() const;
};

// Time-t Radon-Nikodym restrictions of the two T-forward measures
// against the dominating measure, in price-ratio form:
//
//   qcheckT = Zcheck_t Qcheck(t,T) / Qcheck(0,T)   on {tau > t}
//   qtildeT = qcheckT * Xi(t,T) / Xi(0,T)
//
// The bond-numeraire column puts its post-default mass on the
// replacement account; the illiquidity factor vanishes there, so
// forward-weighted factor means only see the pre-default branch.  The
// qtildeT column averages to one at every t, qcheckT at t = 0.
struct ForwardWeights {
    std::vector<double> qcheckT;
    std::vector<double> qtildeT;
    std::vector<double> xi_t;  // illiquidity factor per path at time t
};

struct Kind4BoundsReport {
    MCEstimate lower;   // (1/S_t) E_Q[B_t S_T / B_T | F_t]
    MCEstimate q;       // Q(t,T)
    MCEstimate qcheck;  // liquidity-adjusted price
    bool holds = false; // lower <= min(q, qcheck) + 4 joint se
    std::string detail;
};

// Simulates one scenario under both measures on a shared grid of marks
// and evaluates every (t, T) surface entry from the stored paths.
//
// Surface semantics: estimates at (t, T) are means over the pre-default
// set {tau > t} of the Qcheck run (for Qcheck, S, L, Xi) and over the Q
// run (for Q); at t = 0 the pre-default set is everything and the
// liquidity-adjusted price is the direct Monte Carlo mean of realized
// discount factors.  Conditional entries at t > 0 use each model's
// closed-form conditional prices (all bundled scenarios are Markov).
class TwoPriceEngine {
  public:
    TwoPriceEngine(const Scenario& sc, const std::vector<double>& marks, std::size_t n_paths,
                   std::uint64_t seed, unsigned threads = 1);

    const Scenario& scenario() const { return *scenario_; }
    const MarketPaths& q_run() const { return q_run_; }
    const MarketPaths& qcheck_run() const { return qcheck_run_; }

    MCEstimate market_price(double t, double T) const;
    MCEstimate liquidity_adjusted_price(double t, double T) const;
    MCEstimate illiquidity_premium(double t, double T) const;
    MCEstimate illiquidity_factor(double t, double T) const;
    MCEstimate recovery(double t) const;

    // Payoff-expectation route for the market price, valid when the
    // discounted bond is a true martingale: E_Q[(B_0 S_T)/(S_0 B_T)].
    MCEstimate market_price_payoff_mc(double T) const;

    // Initial-time two-price shortcut Q(0,T)/E_Q[Z_T] from the Q run,
    // and its direct counterpart under Qcheck: the survival-conditional
    // mean of realized discount factors
    //   E_Qcheck[df(0,T) 1{tau>T}] / Qcheck[tau>T].
    // Both routes price the defaultable bond under the terminal-density
    // normalization; agreement is a two-measure consistency oracle.
    MCEstimate qcheck_shortcut(double T) const;
    MCEstimate qcheck_survival_conditional(double T) const;

    PremiumRow row(double t, double T) const;
    PremiumSurface surface(const std::vector<double>& t_list,
                           const std::vector<double>& T_list) const;

    // Forward-measure weights on the Qcheck run (Radon-Nikodym columns
    // of the T-forward measures); rejects scenarios whose discounted
    // bond leg is not a true martingale.
    ForwardWeights forward_measure_weights(double t, double T) const;
    // Qcheck^T-weighted mean of the illiquidity factor at time t.
    MCEstimate xi_forward_weighted(double t, double T) const;
    // Mean of the discounted foreign bond Q(t,T)/Bcheck_t under the
    // dominating measure (martingale surrogate; post-default states
    // contribute zero).
    MCEstimate discounted_bond_mean(double t, double T) const;

    Kind4BoundsReport kind4_bounds_check(double t, double T) const;

  private:
    const Scenario* scenario_;
    MarketPaths q_run_;
    MarketPaths qcheck_run_;
};

}  // namespace illiq
