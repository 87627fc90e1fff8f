#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "sharpfid/numerics/rng.hpp"

namespace sharpfid {

struct Interval {
  double lo;
  double hi;
  double length() const noexcept { return hi - lo; }
};

/// Closed-form (or quadrature-backed) density on a union of intervals.
/// Only `pdf` and `support` are mandatory; missing `mass`/`sampler` fall back
/// to adaptive quadrature and quadrature-based inverse-CDF sampling.
struct ContinuousDensity {
  std::function<double(double)> pdf;
  std::vector<Interval> support;
  std::function<double(double, double)> mass;
  std::function<double(numerics::RngStream&)> sampler;
};

/// Piecewise-constant density. Bins with zero density are allowed (gaps).
struct Histogram {
  std::vector<double> edges;      // strictly increasing, size = densities + 1
  std::vector<double> densities;  // >= 0

  std::size_t bins() const noexcept { return densities.size(); }
  double center(std::size_t i) const { return 0.5 * (edges[i] + edges[i + 1]); }
  double width(std::size_t i) const { return edges[i + 1] - edges[i]; }
};

/// Immutable, cheaply copyable handle to a univariate probability density.
///
/// Variants: a continuous density, a point mass (the sharp-hypothesis
/// component), a histogram built from a weighted sample, a two-component
/// post-data mixture, or the empty measure (complement of the whole line).
class DensityHandle {
 public:
  static DensityHandle continuous(ContinuousDensity density);
  static DensityHandle atom(double location);
  static DensityHandle histogram(Histogram histogram);
  static DensityHandle empty();

  /// p_in * inside + (1 - p_in) * outside. No support checks; see
  /// mixture_post_density for the validated entry point.
  static DensityHandle mixture_unchecked(double p_in, DensityHandle inside, DensityHandle outside);

  bool is_empty() const;
  bool is_atom() const;
  bool is_histogram() const;
  bool is_mixture() const;

  /// Density of the continuous part. Point masses contribute nothing here.
  double pdf(double x) const;
  /// Total mass carried by point masses, and where (at most one atom).
  double atom_mass() const;
  std::optional<double> atom_location() const;
  /// Probability of the closed interval [a, b], point masses included.
  double mass(double a, double b) const;
  double cdf(double x) const;
  double sample(numerics::RngStream& rng) const;

  /// Support as sorted disjoint intervals; an atom is a zero-length interval.
  std::vector<Interval> support() const;

  /// Underlying histogram when is_histogram().
  const Histogram* as_histogram() const;
  /// Mixture parts when is_mixture().
  double mixture_weight() const;
  const DensityHandle* mixture_inside() const;
  const DensityHandle* mixture_outside() const;

  struct Impl;

 private:
  explicit DensityHandle(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// Generic inverse-CDF draw for a continuous pdf on [lo, hi] (finite).
double sample_by_inversion(const std::function<double(double)>& pdf, double lo, double hi,
                           double total_mass, numerics::RngStream& rng);

/// Positive-length overlap between two supports.
double overlap_length(const std::vector<Interval>& a, const std::vector<Interval>& b);

}  // namespace sharpfid
