#pragma once

// Thin wrappers over Boost.Math plus a few log-space helpers that the
// evidence computations need when tail probabilities underflow.

namespace sharpfid::numerics {

inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

double normal_pdf(double x);
double normal_log_pdf(double x);
double normal_cdf(double x);
double normal_ccdf(double x);
/// log Phi(x), finite for all finite x.
double normal_log_cdf(double x);
double normal_quantile(double p);
/// x with 1 - Phi(x) = q.
double normal_cquantile(double q);

/// log(Phi(b) - Phi(a)) for a <= b on the standard scale; -inf when a == b.
double normal_log_interval_prob(double a, double b);
/// log(1 - (Phi(b) - Phi(a))), the mass outside [a, b].
double normal_log_outside_prob(double a, double b);

/// Log of the binomial coefficient times pi^x (1-pi)^(n-x).
double binomial_log_pmf(int x, int n, double pi);
double binomial_pmf(int x, int n, double pi);
/// P(Y <= x) for Y ~ Bin(n, pi).
double binomial_cdf(int x, int n, double pi);

double beta_log_pdf(double u, double a, double b);
/// Regularized incomplete beta I_u(a, b) and its complement.
double ibeta(double a, double b, double u);
double ibetac(double a, double b, double u);
double ibeta_inv(double a, double b, double p);
double ibetac_inv(double a, double b, double q);

double gamma_p_inv(double a, double p);
double gamma_q_inv(double a, double q);
double gamma_p(double a, double x);
double lgamma(double x);

double student_t_pdf(double x, double df);
double student_t_cdf(double x, double df);
double student_t_quantile(double p, double df);

/// log(exp(a) + exp(b)) without overflow.
double log_add(double a, double b);
/// log(exp(a) - exp(b)) for a >= b.
double log_sub(double a, double b);

}  // namespace sharpfid::numerics
