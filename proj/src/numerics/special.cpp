#include "sharpfid/numerics/special.hpp"

#include <cmath>
#include <limits>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace sharpfid::numerics {

namespace {
// Boost promotes double to long double internally by default; double is
// accurate enough here and several times faster.
using Policy = boost::math::policies::policy<boost::math::policies::promote_double<false>>;
const Policy kPolicy{};
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSqrt1_2 = 0.70710678118654752440;
}  // namespace

double normal_pdf(double x) { return std::exp(normal_log_pdf(x)); }

double normal_log_pdf(double x) { return -0.5 * x * x - kLogSqrt2Pi; }

double normal_cdf(double x) { return 0.5 * std::erfc(-x * kSqrt1_2); }

double normal_ccdf(double x) { return 0.5 * std::erfc(x * kSqrt1_2); }

double normal_log_cdf(double x) {
  if (x > -37.0) return std::log(normal_cdf(x));
  if (x == -kInf) return -kInf;
  // erfc underflows near x = -38; use the asymptotic series of the Mills ratio.
  const double t = 1.0 / (x * x);
  const double series = 1.0 - t * (1.0 - 3.0 * t * (1.0 - 5.0 * t * (1.0 - 7.0 * t)));
  return normal_log_pdf(x) - std::log(-x) + std::log(series);
}

double normal_quantile(double p) {
  if (p <= 0.0) return -kInf;
  if (p >= 1.0) return kInf;
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p, kPolicy);
}

double normal_cquantile(double q) { return -normal_quantile(q); }

double normal_log_interval_prob(double a, double b) {
  if (!(a < b)) return -kInf;
  // Work in whichever tail keeps the subtraction accurate.
  if (a > 0.0) return log_sub(normal_log_cdf(-a), normal_log_cdf(-b));
  if (b < 0.0) return log_sub(normal_log_cdf(b), normal_log_cdf(a));
  return std::log1p(-(normal_cdf(a) + normal_ccdf(b)));
}

double normal_log_outside_prob(double a, double b) {
  if (!(a < b)) return 0.0;
  return log_add(normal_log_cdf(a), normal_log_cdf(-b));
}

double binomial_log_pmf(int x, int n, double pi) {
  if (x < 0 || x > n) return -kInf;
  const double log_coef =
      std::lgamma(n + 1.0) - std::lgamma(x + 1.0) - std::lgamma(n - x + 1.0);
  double out = log_coef;
  if (x > 0) out += x * std::log(pi);
  if (x < n) out += (n - x) * std::log1p(-pi);
  return out;
}

double binomial_pmf(int x, int n, double pi) { return std::exp(binomial_log_pmf(x, n, pi)); }

double binomial_cdf(int x, int n, double pi) {
  if (x < 0) return 0.0;
  if (x >= n) return 1.0;
  if (pi <= 0.0) return 1.0;
  if (pi >= 1.0) return 0.0;
  // P(Y <= x) = I_{1-pi}(n - x, x + 1)
  return boost::math::ibetac(static_cast<double>(x + 1), static_cast<double>(n - x), pi, kPolicy);
}

double beta_log_pdf(double u, double a, double b) {
  if (u < 0.0 || u > 1.0) return -kInf;
  const double log_norm = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
  double out = log_norm;
  if (a != 1.0) out += (a - 1.0) * std::log(u);
  if (b != 1.0) out += (b - 1.0) * std::log1p(-u);
  return out;
}

double ibeta(double a, double b, double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return boost::math::ibeta(a, b, u, kPolicy);
}

double ibetac(double a, double b, double u) {
  if (u <= 0.0) return 1.0;
  if (u >= 1.0) return 0.0;
  return boost::math::ibetac(a, b, u, kPolicy);
}

double ibeta_inv(double a, double b, double p) {
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  return boost::math::ibeta_inv(a, b, p, kPolicy);
}

double ibetac_inv(double a, double b, double q) {
  if (q <= 0.0) return 1.0;
  if (q >= 1.0) return 0.0;
  return boost::math::ibetac_inv(a, b, q, kPolicy);
}

double gamma_p_inv(double a, double p) { return boost::math::gamma_p_inv(a, p, kPolicy); }
double gamma_q_inv(double a, double q) { return boost::math::gamma_q_inv(a, q, kPolicy); }
double gamma_p(double a, double x) { return x <= 0.0 ? 0.0 : boost::math::gamma_p(a, x, kPolicy); }
double lgamma(double x) { return std::lgamma(x); }

double student_t_pdf(double x, double df) {
  return boost::math::pdf(boost::math::students_t_distribution<double, Policy>(df), x);
}

double student_t_cdf(double x, double df) {
  if (x == kInf) return 1.0;
  if (x == -kInf) return 0.0;
  return boost::math::cdf(boost::math::students_t_distribution<double, Policy>(df), x);
}

double student_t_quantile(double p, double df) {
  return boost::math::quantile(boost::math::students_t_distribution<double, Policy>(df), p);
}

double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -kInf) return a;
  return a + std::log1p(std::exp(b - a));
}

double log_sub(double a, double b) {
  if (b == -kInf) return a;
  if (b >= a) return -kInf;
  return a + std::log(-std::expm1(b - a));
}

}  // namespace sharpfid::numerics
