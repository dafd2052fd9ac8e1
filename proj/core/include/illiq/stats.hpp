// Monte Carlo estimators, confidence intervals and the martingale
// defect test shared by all modules.

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace illiq {

struct MCEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t n = 0;
    double ci_level = 0.95;

    double half_width() const;
    double lo() const { return mean - half_width(); }
    double hi() const { return mean + half_width(); }
};

// Deterministic pairwise summation (fixed recursion order, independent
// of the worker count used to produce the samples).
double pairwise_sum(std::span<const double> xs);

// Sample mean with standard error (n-1 denominator).  Requires n >= 2.
MCEstimate mc_mean(std::span<const double> xs, double ci_level = 0.95);

// Mean of a * b over paths (same index pairing).
MCEstimate mc_mean_product(std::span<const double> a, std::span<const double> b,
                           double ci_level = 0.95);

// Ratio of two means estimated from the same paths; first-order delta
// method for the standard error.
MCEstimate ratio_of_means(std::span<const double> num, std::span<const double> den,
                          double ci_level = 0.95);

// Collapses antithetic pairs (2k, 2k+1) into pair averages.
std::vector<double> antithetic_pair_means(std::span<const double> xs);

// Excess kurtosis; integrability warning heuristic for heavy-tailed
// estimators.
double excess_kurtosis(std::span<const double> xs);

enum class Verdict { TrueMartingale, StrictLocal, Inconclusive };

const char* to_string(Verdict v);

// One-sided test of H0: E[Z_T] = claimed_mean against E[Z_T] < claimed_mean.
// StrictLocal requires rejection at the given confidence; TrueMartingale is
// only issued as "fail to reject" backed by a closed-form confirmation.
struct DefectTest {
    double claimed_mean = 1.0;
    MCEstimate sample;
    double defect = 0.0;  // claimed_mean - sample.mean
    double z_statistic = 0.0;
    double p_value = 1.0;
    double confidence = 0.99;
    bool closed_form_confirmed = false;
    Verdict verdict = Verdict::Inconclusive;
};

DefectTest defect_test(std::span<const double> samples, double claimed_mean = 1.0,
                       double confidence = 0.99, bool closed_form_confirmed = false);

}  // namespace illiq
