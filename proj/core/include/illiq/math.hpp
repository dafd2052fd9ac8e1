// Scalar probability functions shared across the library.

#pragma once

namespace illiq {

// Standard normal distribution function Phi(x).  Absolute error below
// 1e-12 over the whole real line (backed by erfc).
double normal_cdf(double x);

// Standard normal density.
double normal_pdf(double x);

// Inverse of normal_cdf on (0,1); Wichura's PPND16 rational
// approximation, relative error around 1e-15.  Throws
// std::invalid_argument outside (0,1).
double inverse_normal_cdf(double p);

// Two-sided critical value z with Phi(z) - Phi(-z) = level.
double normal_two_sided_quantile(double level);

}  // namespace illiq
