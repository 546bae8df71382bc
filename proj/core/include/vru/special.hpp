#pragma once

namespace vru {

// Error function pair. Power series below 2.5 (positive terms, no
// cancellation), Lentz continued fraction above; absolute error below 1e-15.
double erf(double x) noexcept;
double erfc(double x) noexcept;

double normal_pdf(double z) noexcept;
double normal_cdf(double z) noexcept;
// Natural log of normal_cdf, finite far into the lower tail.
double log_normal_cdf(double z) noexcept;
// Inverse of normal_cdf for p in (0, 1).
double normal_quantile(double p);

double logistic(double x) noexcept;
double logit(double p) noexcept;

double log_beta(double a, double b) noexcept;
double beta_log_density(double x, double a, double b) noexcept;
// Regularized incomplete beta I_x(a, b), continued fraction evaluation.
double incomplete_beta(double x, double a, double b);

}  // namespace vru
