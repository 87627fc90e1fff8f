#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "sharpfid/core/types.hpp"
#include "sharpfid/numerics/roots.hpp"

namespace sharpfid {

/// p0 m_in / (p0 m_in + (1 - p0) m_out).
/// Throws IndeterminateEvidence when both evidences are zero and p0 is in (0, 1).
double post_data_probability(double p0, double m_in, double m_out);

/// Same, with evidences given as logs (-inf for zero).
double post_data_probability_log(double p0, double log_m_in, double log_m_out);

/// Validated post-data mixture. Component supports must not overlap on a set
/// of positive length (an atom may sit on the other component's boundary).
DensityHandle mixture_post_density(const std::pair<DensityHandle, DensityHandle>& components,
                                   double p_in);

/// Multiplies a continuous density by the GPD weight and the region indicator,
/// then renormalizes. Throws ZeroMass if nothing is left.
DensityHandle apply_gpd_weight(const DensityHandle& base, const GpdSpec& gpd,
                               const numerics::Region& region);

/// Sample version: weights times GPD weight of proj(value) times indicator.
template <class Point, class Projection>
WeightedSample<Point> apply_gpd_weight(const WeightedSample<Point>& base, const GpdSpec& gpd,
                                       const numerics::Region& region, Projection proj) {
  std::vector<Point> values;
  std::vector<double> weights;
  values.reserve(base.size());
  weights.reserve(base.size());
  double total = 0.0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    const double theta = proj(base.values()[i]);
    if (!region.contains(theta)) continue;
    const double w = base.weights()[i] *
                     (region.side == numerics::Region::Side::inside ? gpd.weight(theta) : 1.0);
    values.push_back(base.values()[i]);
    weights.push_back(w);
    total += w;
  }
  if (!(total > 0.0)) throw ZeroMass("apply_gpd_weight: no sample mass in the region");
  for (double& w : weights) w /= total;
  return WeightedSample<Point>(std::move(values), std::move(weights));
}

inline WeightedSample<double> apply_gpd_weight(const WeightedSample<double>& base,
                                               const GpdSpec& gpd,
                                               const numerics::Region& region) {
  return apply_gpd_weight(base, gpd, region, [](double v) { return v; });
}

/// Self-normalized importance estimate of the post-data probability from a
/// sample of the unconditioned fiducial distribution.
///
/// For each draw: whether the parameter of interest lies inside the hypothesis
/// interval, the bump value h there (ignored outside or when flat), and the
/// log-likelihood of the observed data. The inside component is weighted by
/// 1 + tau h; tau is solved for continuity unless the GPD fixes it.
struct ImportanceDraws {
  std::span<const std::uint8_t> inside;
  std::span<const double> bump;
  std::span<const double> log_likelihood;
};

struct ImportanceEstimate {
  double p_in = 0.0;
  double tau = 0.0;
  bool smoothed = false;
  double log_m_in = 0.0;
  double log_m_out = 0.0;
  double mc_stderr = 0.0;
  /// ESS of the final mixture-weighted sample.
  double ess = 0.0;
  std::size_t n_inside = 0;
  std::size_t n_outside = 0;
  /// Per-draw weight under the post-data mixture (sums to 1).
  std::vector<double> mixture_weights;
  /// Per-draw weight within its own component (sums to 1 per component).
  std::vector<double> component_weights;
};

ImportanceEstimate estimate_by_importance(const ImportanceDraws& draws, double prior,
                                          const GpdSpec& gpd);

}  // namespace sharpfid
