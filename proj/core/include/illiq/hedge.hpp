// The explicit arbitrage construction: conditional default probability,
// the a_T constant, the delta hedge and self-financing wealth
// simulation under both measures, plus the admissibility probe.
//
// The traded asset is the density leg Zcheck: a Bessel(3) process under
// the reference measure Q (never absorbed) and Brownian motion stopped
// at the origin under the dominating measure Qcheck.  Both start at 1.
// Wealth is accumulated with left-point sums V += H dZcheck from zero
// initial wealth; the target payoff is 1{tau > T} - a_T 1{tau <= T}.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "illiq/grid.hpp"
#include "illiq/paths.hpp"

namespace illiq {

// Qcheck[tau <= T | F_t] at state z: 2 Phi(-z / sqrt(T-t)), or 1 once
// absorbed.  Rejects t >= T.
double conditional_default_prob(double z, double t, double T, bool absorbed = false);

// a_T = Qcheck[tau > T] / Qcheck[tau <= T] = 1 / (2 Phi(-1/sqrt(T))) - 1.
double a_constant(double T);

// Delta hedge H_t = (1 + a_T) sqrt(2/pi) exp(-z^2/(2(T-t))) / sqrt(T-t).
// Evaluation inside the final eps_floor window is clamped to the window
// edge; returns 0 once absorbed.
double delta_hedge(double z, double t, double T, double eps_floor, bool absorbed = false);

struct HedgeRun {
    Measure measure = Measure::Qcheck;
    double T = 1.0;
    double a_T = 0.0;
    double eps_floor = 0.0;
    std::uint64_t seed = 0;
    std::size_t n_paths = 0;

    std::vector<std::uint8_t> absorbed;
    std::vector<double> tau_time;
    std::vector<double> v_terminal;
    std::vector<double> repl_error;      // V_T - target payoff
    std::vector<double> min_v_z;         // running minimum in Zcheck-market units
    std::vector<double> min_v_b;         // running minimum re-expressed in B units (pre-tau)
    std::vector<double> zcheck_terminal; // reweighting hook for measure consistency
    std::vector<std::size_t> flagged;    // |error| > 10 x batch RMS

    double mean_v = 0.0;
    double rms_error = 0.0;
    double cluster_weight_survive = 0.0;  // V_T nearer to 1
    double cluster_weight_default = 0.0;  // V_T nearer to -a_T

    // header: path_id,absorbed,tau_time,V_T,repl_error,min_V_Zunits,min_V_Bunits
    std::string to_csv() const;
};

// Requires a geometrically refined grid (eps_floor set) reaching T.
HedgeRun replicate(Measure measure, double T, std::size_t n_paths, const TimeGrid& grid,
                   std::uint64_t seed, unsigned threads = 1);

// Single-path trace for the bit-level self-financing accounting check.
struct HedgeTrace {
    std::vector<double> increments;  // H_i * (Zcheck_{i+1} - Zcheck_i), in order
    double v_terminal = 0.0;
};
HedgeTrace replicate_path_trace(Measure measure, double T, const TimeGrid& grid,
                                std::uint64_t seed, std::size_t path_id);

// RMS replication error under Q across eps_floor levels, on nested
// grids driven by common paths (the finest grid's increments).  The
// floor is the single refinement knob: each level uses the grid
// refined(T, 2 * eps, eps), so quartering the floor halves the error.
struct RefinementStudy {
    std::vector<double> eps_levels;
    std::vector<double> rms;
    double mean_v_finest = 0.0;
};
RefinementStudy replicate_refinement_study(double T, std::size_t n_paths,
                                           const std::vector<double>& eps_levels,
                                           std::uint64_t seed, unsigned threads = 1);

// The grid family used by the replication experiments.
TimeGrid replication_grid(double T, double eps_floor);

// Empirical unboundedness probe on a Q-measure run: the B-unit wealth
// minimum over growing path budgets must keep decreasing while the
// Zcheck-unit floor stays above -a_T - tolerance.
struct AdmissibilityReport {
    std::vector<std::size_t> budgets;
    std::vector<double> min_b_by_budget;
    double min_z_overall = 0.0;
    double z_floor = 0.0;  // -a_T - tolerance
    bool z_floor_ok = false;
    bool b_min_decreasing = false;
    std::string summary;
};
AdmissibilityReport admissibility_probe(const HedgeRun& q_run,
                                        const std::vector<std::size_t>& budgets,
                                        double tolerance = 0.05);

}  // namespace illiq
