// Named market models and the empirical kind classifier.
//
// Five concrete builders, all Markov and all with exact grid-point
// transitions:
//
//   kind1            bounded-volatility exponential martingale deflator;
//                    efficient market, premium identically zero.
//   kind2_canonical  deflator = reciprocal Bessel(3) under Q, stopped
//                    Brownian motion under Qcheck; the bond leg is flat,
//                    so prices and premia have closed forms.
//   kind3_hyper      bank accounts equal to a Bessel(3) process, Z = 1;
//                    hyperliquid market with negative premium.
//   kind4_composite  two independent reciprocal-Bessel(3) legs, one for
//                    the discounted bond and one for the deflator; the
//                    premium sign is state-dependent.
//   pure_illiquidity growth-optimal portfolio driven by a 4-d Brownian
//                    motion; deterministic fundamental curve.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "illiq/config.hpp"
#include "illiq/foellmer.hpp"
#include "illiq/paths.hpp"
#include "illiq/stats.hpp"

namespace illiq {

enum class Kind { Kind1, Kind2Canonical, Kind3Hyper, Kind4Composite, PureIlliquidity };

const char* to_string(Kind k);
Kind kind_from_string(const std::string& s);

enum class PostDefaultCurve { Flat, Deterministic };

// Strictly positive deterministic cadlag function f (piecewise needs
// have been constant or exponential so far).
struct FunctionSpec {
    enum class Type { Constant, Exponential };
    Type type = Type::Constant;
    double f0 = 1.0;
    double rate = 0.0;

    double operator()(double t) const;
};

struct ScenarioSpec {
    static constexpr int kSchemaVersion = 1;

    Kind kind = Kind::Kind2Canonical;
    double horizon = 1.0;
    std::size_t n_paths = 100000;
    std::uint64_t seed = 0;

    double grid_base_dt = 0.0625;
    bool grid_refine = false;
    double grid_eps_floor = 0.0;    // required when grid_refine
    double grid_tail_ratio = 0.9375;

    PostDefaultCurve post_default = PostDefaultCurve::Flat;
    double post_default_rate = 0.0;  // deterministic curve: exp(-rate (T-t))

    double kind1_volatility = 0.5;
    double kind2_z0 = 1.0;
    double kind3_x0 = 1.0;
    double kind4_x0 = 1.0;
    double kind4_z0 = 1.0;
    std::uint64_t kind4_seed_offset = 0x100000000ull;
    std::array<double, 4> pure_x{1.0, 0.0, 0.0, 0.0};
    FunctionSpec pure_f;

    // Parses the documented schema; unknown keys (including parameters
    // of other kinds) are rejected with the offending line.
    static ScenarioSpec from_config(const Config& cfg);
    static ScenarioSpec from_file(const std::string& path);

    void validate() const;
    double pure_norm_sq() const;  // |x|^2
};

// One simulated market: recovery rate, the two bank accounts and the
// generalized density pair on a shared grid.
struct MarketPaths {
    TimeGrid grid;
    Measure measure = Measure::Q;
    std::size_t n_paths = 0;
    std::vector<double> S, B, Bcheck;  // time-major, like PathSet
    GeneralizedDensity density;

    double s_at(std::size_t p, std::size_t i) const { return S[i * n_paths + p]; }
    double b_at(std::size_t p, std::size_t i) const { return B[i * n_paths + p]; }
    double bcheck_at(std::size_t p, std::size_t i) const { return Bcheck[i * n_paths + p]; }
    const AbsorptionInfo& tau() const { return density.tau; }

    // S in (0,1], B_0 = Bcheck_0 = 1, Z_0 = 1, everything finite.
    void check_invariants() const;
};

class Scenario {
  public:
    explicit Scenario(ScenarioSpec spec);

    const ScenarioSpec& spec() const { return spec_; }
    Kind kind() const { return spec_.kind; }

    MarketPaths simulate(Measure m, const TimeGrid& grid, std::size_t n_paths,
                         std::uint64_t seed, unsigned threads = 1) const;

    // ---- pathwise valuation ------------------------------------------------
    // Market price Q(t,T) per path; vanishes on post-default states.
    std::vector<double> q_price(const MarketPaths& m, double t, double T) const;
    // Liquidity-adjusted price per path: closed-form conditional of the
    // fundamental value under the configured post-default curve.
    std::vector<double> qcheck_price(const MarketPaths& m, double t, double T) const;
    // Conditional default probability Qcheck[tau <= T | F_t] per path.
    std::vector<double> default_prob(const MarketPaths& m, double t, double T) const;
    // Realized stochastic discount factors: pre-default account on
    // {tau > T}, replacement account on {tau <= T}.
    std::vector<double> discount_factor(const MarketPaths& m, double t, double T) const;
    // Common lower bound (1/S_t) E_Q[B_t S_T / B_T | F_t] per path.
    std::vector<double> lower_bound(const MarketPaths& m, double t, double T) const;

    // Replacement curve value (1 for the flat extension).
    double post_default_value(double t, double T) const;

    // ---- closed-form scalars ----------------------------------------------
    double q0(double T) const;                       // Q(0,T)
    double qcheck0_closed(double T) const;           // Q̌(0,T)
    double expected_deflator(double T) const;        // E_Q[Z_T]
    bool z_true_martingale() const;                  // closed-form tag
    bool pb_true_martingale() const;                 // closed-form tag

    // ---- defect-test samples (under Q) ------------------------------------
    std::vector<double> z_terminal(const MarketPaths& m, double T) const;
    std::vector<double> pb_normalized_terminal(const MarketPaths& m, double T) const;

    // ---- nested Markov restarts --------------------------------------------
    bool is_markov() const { return true; }
    // Definition-7.2 estimate restarted from path p's time-t state
    // (simulated under Qcheck).
    double nested_qcheck(const MarketPaths& m, std::size_t p, double t, double T,
                         std::size_t n_inner, std::uint64_t seed) const;
    // One inner draw of Z_T/Z_t under Q from path p's time-t state, for
    // the generalized Bayes conditional.
    NestedDeflatorSampler make_deflator_sampler(const MarketPaths& m, double t,
                                                double T) const;

  private:
    ScenarioSpec spec_;
};

// ---- closed-form prices of the named examples ---------------------------

// 1 - 2 Phi(-x / sqrt(T-t)); requires t < T and x > 0.
double hyperliquidity_price(double t, double T, double x);

// f(T)/f(t) (1 - exp(-norm_sq / (2(T-t)))) where norm_sq = |x + W~_t|^2.
// t == T is rejected unless at_maturity is set, in which case the payoff
// value 1 is returned.
double pure_illiquidity_price(double t, double T, double norm_sq, const FunctionSpec& f,
                              bool at_maturity = false);

// Fundamental value f(T)/f(t) of the pure-illiquidity model.
double pure_fundamental_price(double t, double T, const FunctionSpec& f);

// ---- market-kind classification --------------------------------------------

enum class MarketKindCell { First, Second, Third, Fourth, Indeterminate };

const char* to_string(MarketKindCell c);
const char* premium_sign_prediction(MarketKindCell c);

struct KindClassification {
    DefectTest pb_test;  // discounted defaultable bond leg
    DefectTest z_test;   // illiquidity deflator leg
    MarketKindCell cell = MarketKindCell::Indeterminate;
};

KindClassification classify_kind(const Scenario& sc, double T_probe, std::size_t n_paths,
                                 double confidence, std::uint64_t seed, unsigned threads = 1);

}  // namespace illiq
