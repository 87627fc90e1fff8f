#pragma once

#include "sharpfid/numerics/rng.hpp"

namespace sharpfid::numerics {

/// Either the closed interval [lo, hi] or its complement.
struct Region {
  enum class Side { inside, outside };

  Side side = Side::inside;
  double lo = 0.0;
  double hi = 0.0;

  static Region inside(double lo, double hi) { return {Side::inside, lo, hi}; }
  static Region outside(double lo, double hi) { return {Side::outside, lo, hi}; }
  static Region everything();

  bool contains(double x) const noexcept {
    const bool in = x >= lo && x <= hi;
    return side == Side::inside ? in : !in;
  }
};

/// Probability of `region` under N(mean, sd^2).
double normal_region_prob(double mean, double sd, const Region& region);
double normal_region_log_prob(double mean, double sd, const Region& region);

/// One draw from N(mean, sd^2) conditioned on `region`, by inverse CDF using
/// whichever tail keeps precision. Throws ZeroRegionMass below 1e-300.
double sample_truncated_normal(double mean, double sd, const Region& region, RngStream& rng);

/// Mass of Beta(alpha, beta) on [lo, hi].
double beta_interval_prob(double alpha, double beta, double lo, double hi);

/// One draw from Beta(alpha, beta) restricted to [lo, hi], by inverting the
/// regularized incomplete beta function.
double sample_truncated_beta(double alpha, double beta, double lo, double hi, RngStream& rng);

/// Inverse-gamma draw: scale / X with X ~ Gamma(shape, 1).
double sample_inverse_gamma(double shape, double scale, RngStream& rng);

}  // namespace sharpfid::numerics
