#pragma once

#include <utility>

#include "sharpfid/core/summaries.hpp"
#include "sharpfid/core/types.hpp"

namespace sharpfid::relative_risk {

/// pi_t / pi_c in [1/(1+eps), 1+eps].
struct RatioHypothesis {
  double eps = 0.0;
  double prior_prob = 0.5;

  RatioHypothesis() = default;
  RatioHypothesis(double eps, double prior_prob);

  double lo() const noexcept { return 1.0 / (1.0 + eps); }
  double hi() const noexcept { return 1.0 + eps; }
  IntervalHypothesis interval() const { return {lo(), hi(), prior_prob}; }
};

struct BumpShape {
  double alpha = 4.0;
  double beta = 4.0;
};

/// (pi_t, pi_c) pairs from the product of the two single-arm fiducials.
WeightedSample<std::pair<double, double>> sample_joint_fS(const TwoArmCounts& c,
                                                          const McOptions& options);

/// Relative gap between the one-sided limits of the ratio marginal at each
/// endpoint of the hypothesis interval.
struct EndpointJumps {
  double at_lo = 0.0;
  double at_hi = 0.0;
  double max() const noexcept { return at_lo > at_hi ? at_lo : at_hi; }
};

struct RelativeRiskResult {
  /// density_in / density_out are histograms of the ratio pi_t / pi_c.
  PostDataResult ratio;
  DensityHandle pi_t = DensityHandle::empty();
  DensityHandle pi_c = DensityHandle::empty();
  EndpointJumps continuity;
  std::size_t n_inside = 0;
};

/// Importance-sampled analysis on one joint fiducial sample. The inside
/// component is weighted by 1 + tau h(rho), h symmetric in log(rho), and tau
/// is solved on the same sample. A smoothed GPD is always used; p0 in {0, 1}
/// gives tau = 0.
RelativeRiskResult analyze(const TwoArmCounts& c, const RatioHypothesis& hyp,
                           const BumpShape& bump, const McOptions& options);

/// The same pipeline with each arm's fiducial replaced by the
/// Beta(e + 1/2, n - e + 1/2) posterior.
RelativeRiskResult jeffreys_approx(const TwoArmCounts& c, const RatioHypothesis& hyp,
                                   const BumpShape& bump, const McOptions& options);

}  // namespace sharpfid::relative_risk
