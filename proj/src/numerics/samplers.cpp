#include "sharpfid/numerics/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sharpfid/error.hpp"
#include "sharpfid/numerics/special.hpp"

namespace sharpfid::numerics {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMinMass = 1e-300;

// Draw from N(0, 1) restricted to [a, b] by inverting the CDF in the tail
// where the probabilities are representable.
double standard_inside(double a, double b, double u) {
  double x;
  if (a > 0.0) {
    const double qa = normal_ccdf(a);
    const double qb = normal_ccdf(b);
    x = normal_cquantile(qa - u * (qa - qb));
  } else if (b < 0.0) {
    const double pa = normal_cdf(a);
    const double pb = normal_cdf(b);
    x = normal_quantile(pa + u * (pb - pa));
  } else {
    const double pa = normal_cdf(a);
    const double pb = normal_cdf(b);
    x = normal_quantile(pa + u * (pb - pa));
  }
  return std::clamp(x, a, b);
}

double standard_outside(double a, double b, double u) {
  const double left = normal_cdf(a);
  const double right = normal_ccdf(b);
  const double t = u * (left + right);
  if (t < left) return std::min(normal_quantile(t), a);
  return std::max(normal_cquantile(right - (t - left)), b);
}

}  // namespace

Region Region::everything() { return inside(-kInf, kInf); }

double normal_region_log_prob(double mean, double sd, const Region& region) {
  detail::require(sd > 0.0, "normal_region_log_prob: sd must be positive");
  const double a = (region.lo - mean) / sd;
  const double b = (region.hi - mean) / sd;
  return region.side == Region::Side::inside ? normal_log_interval_prob(a, b)
                                             : normal_log_outside_prob(a, b);
}

double normal_region_prob(double mean, double sd, const Region& region) {
  return std::exp(normal_region_log_prob(mean, sd, region));
}

double sample_truncated_normal(double mean, double sd, const Region& region, RngStream& rng) {
  detail::require(sd > 0.0, "sample_truncated_normal: sd must be positive");
  detail::require(region.lo <= region.hi, "sample_truncated_normal: lo > hi");
  if (normal_region_log_prob(mean, sd, region) < std::log(kMinMass)) {
    throw ZeroRegionMass("sample_truncated_normal: region has no probability");
  }
  const double a = (region.lo - mean) / sd;
  const double b = (region.hi - mean) / sd;
  const double u = rng.uniform();
  const double z =
      region.side == Region::Side::inside ? standard_inside(a, b, u) : standard_outside(a, b, u);
  double x = mean + sd * z;
  // Guard the region boundary against rounding in mean + sd z.
  if (region.side == Region::Side::inside) {
    x = std::clamp(x, region.lo, region.hi);
  } else if (x > region.lo && x < region.hi) {
    x = z < 0.0 ? region.lo : region.hi;
  }
  return x;
}

double beta_interval_prob(double alpha, double beta, double lo, double hi) {
  detail::require(alpha > 0.0 && beta > 0.0, "beta_interval_prob: shapes must be positive");
  lo = std::clamp(lo, 0.0, 1.0);
  hi = std::clamp(hi, 0.0, 1.0);
  if (!(lo < hi)) return 0.0;
  const double mean = alpha / (alpha + beta);
  if (lo > mean) return ibetac(alpha, beta, lo) - ibetac(alpha, beta, hi);
  return ibeta(alpha, beta, hi) - ibeta(alpha, beta, lo);
}

double sample_truncated_beta(double alpha, double beta, double lo, double hi, RngStream& rng) {
  detail::require(alpha > 0.0 && beta > 0.0, "sample_truncated_beta: shapes must be positive");
  lo = std::clamp(lo, 0.0, 1.0);
  hi = std::clamp(hi, 0.0, 1.0);
  detail::require(lo <= hi, "sample_truncated_beta: lo > hi");
  const double u = rng.uniform();
  const double mean = alpha / (alpha + beta);
  double x;
  if (lo > mean) {
    const double q_lo = ibetac(alpha, beta, lo);
    const double q_hi = ibetac(alpha, beta, hi);
    if (!(q_lo - q_hi > kMinMass)) throw ZeroRegionMass("sample_truncated_beta: zero mass");
    x = ibetac_inv(alpha, beta, q_lo - u * (q_lo - q_hi));
  } else {
    const double p_lo = ibeta(alpha, beta, lo);
    const double p_hi = ibeta(alpha, beta, hi);
    if (!(p_hi - p_lo > kMinMass)) throw ZeroRegionMass("sample_truncated_beta: zero mass");
    x = ibeta_inv(alpha, beta, p_lo + u * (p_hi - p_lo));
  }
  return std::clamp(x, lo, hi);
}

double sample_inverse_gamma(double shape, double scale, RngStream& rng) {
  detail::require(shape > 0.0 && scale > 0.0, "sample_inverse_gamma: shape and scale must be positive");
  const double u = rng.uniform();
  const double g = u < 0.5 ? gamma_p_inv(shape, u) : gamma_q_inv(shape, 1.0 - u);
  return scale / g;
}

}  // namespace sharpfid::numerics
