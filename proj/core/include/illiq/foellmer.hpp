// Generalized density processes and measure-change reweighting.
//
// Z is a non-negative supermartingale with Z_0 = 1 under the reference
// measure Q; the dominating measure Qcheck carries the explosion time
// tau.  The two directions of the transformation are
//
//   Qcheck[A, tau > t] = E_Q[Z_t 1_A]            (density direction)
//   Q[A, Z_t > 0]      = E_Qcheck[Zcheck_t 1_A]  (inverse direction)
//
// with Zcheck_t = (1/Z_t) 1{tau > t}.  Sampled under Qcheck, Z is
// stored as 0 from tau onwards; every Q-expectation weight vanishes
// there, which keeps the arithmetic faithful to the indicator in the
// inverse transformation formula.

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "illiq/paths.hpp"
#include "illiq/rng.hpp"
#include "illiq/stats.hpp"

namespace illiq {

struct GeneralizedDensity {
    TimeGrid grid;
    std::size_t n_paths = 0;
    Measure native = Measure::Q;
    std::vector<double> z;       // time-major, like PathSet
    std::vector<double> zcheck;  // time-major
    AbsorptionInfo tau;

    double z_at(std::size_t path, std::size_t t_index) const {
        return z[t_index * n_paths + path];
    }
    double zcheck_at(std::size_t path, std::size_t t_index) const {
        return zcheck[t_index * n_paths + path];
    }
    std::span<const double> z_slice(std::size_t t_index) const {
        return {z.data() + t_index * n_paths, n_paths};
    }
    std::span<const double> zcheck_slice(std::size_t t_index) const {
        return {zcheck.data() + t_index * n_paths, n_paths};
    }
};

// Density pair from a strictly positive deflator simulated under Q
// (tau never happens under Q): Zcheck = 1/Z.
GeneralizedDensity density_from_q_deflator(const PathSet& z_paths, std::size_t comp = 0);

// Density pair from a non-negative true Qcheck-martingale with
// absorption (the inverse construction scheme): Z = 1/Zcheck before
// tau and 0 afterwards.  zcheck_paths values must be normalized to
// start at 1.
GeneralizedDensity density_from_qcheck_martingale(const PathSet& zcheck_paths,
                                                  const AbsorptionInfo& tau,
                                                  std::size_t comp = 0);

// E_Q[H 1{Z_t > 0}] from Qcheck samples: mean of Zcheck_t * H.
// H holds one value per path, measurable from path data up to t.
MCEstimate expectation_under_Q(const GeneralizedDensity& d, double t,
                               std::span<const double> h, double ci_level = 0.95);

// E_Qcheck[H 1{tau > t}] from Q samples: mean of Z_t * H.
MCEstimate expectation_under_Qcheck_pre_tau(const GeneralizedDensity& d, double t,
                                            std::span<const double> h,
                                            double ci_level = 0.95);

// Qcheck[tau <= T] = 1 - E_Q[Z_T]; estimated in the native measure
// (absorbed fraction under Qcheck, reweighting under Q).
MCEstimate explosion_cdf(const GeneralizedDensity& d, double T, double ci_level = 0.95);

// One inner draw of (Z_T / Z_t) * H_T restarted from the time-t state
// of an outer path; the stream is owned by the caller.
using NestedDeflatorSampler =
    std::function<double(std::size_t outer_path, rng::PathStream& gen)>;

// Generalized Bayes conditional on {tau > t}:
//   (1/Z_t) 1{tau > t} E_Q[Z_T H_T | F_t]
// estimated per outer path by nested simulation (Markov restart).
// For t == T the conditioning is degenerate and H_T 1{tau > T} is
// returned exactly (h_at_T supplies those values).
std::vector<double> bayes_conditional(const GeneralizedDensity& d, double t, double T,
                                      const NestedDeflatorSampler& sampler,
                                      std::size_t n_inner, std::uint64_t seed,
                                      std::span<const double> h_at_T = {});

}  // namespace illiq
