#pragma once

#include <utility>
#include <vector>

#include "sharpfid/core/summaries.hpp"
#include "sharpfid/core/types.hpp"
#include "sharpfid/numerics/roots.hpp"

namespace sharpfid::normal_known {

/// Fiducial density N(xbar, se^2) conditioned on the hypothesis interval and
/// on its complement. A sharp hypothesis gives an atom for the inside part.
std::pair<DensityHandle, DensityHandle> fiducial_components(const NormalKnownSummary& s,
                                                            const IntervalHypothesis& hyp);

/// Predictive evidences at the observed xbar, on the log scale. Only the
/// difference is meaningful. A smoothed GPD must carry a fixed tau here.
struct Evidence {
  double log_m_in = 0.0;
  double log_m_out = 0.0;
  double ratio() const;
};

Evidence predictive_evidence(const NormalKnownSummary& s, const IntervalHypothesis& hyp,
                             const GpdSpec& gpd);

/// Closed-form post-data probability of mu = 0 at z = xbar sqrt(n) / sigma.
double post_prob_sharp(double z, double p0);

/// Lower bound on the posterior probability of mu = 0 over every prior that
/// puts mass p0 on mu = 0, whatever its shape elsewhere.
double berger_sellke_lower_bound(double z, double p0);

/// Continuity model for the smoothed weight 1 + tau h on [lo, hi].
/// Requires a non-sharp interval.
numerics::LinearTauModel tau_model(const NormalKnownSummary& s, const IntervalHypothesis& hyp,
                                   const BumpDensity& bump);

PostDataResult analyze(const NormalKnownSummary& s, const IntervalHypothesis& hyp,
                       const GpdSpec& gpd);

/// The same post-data density of mu, set up for many cheap draws with one
/// (xbar, se). Integrals use a fixed Gauss-Legendre rule instead of adaptive
/// quadrature, and draws from the h-weighted part invert a tabulated CDF.
class MixtureSampler {
 public:
  MixtureSampler(double xbar, double se, const IntervalHypothesis& hyp, const GpdSpec& gpd);

  double p_in() const noexcept { return p_in_; }
  double tau() const noexcept { return tau_; }
  double sample(numerics::RngStream& rng) const;
  /// A draw from the inside component alone.
  double sample_inside(numerics::RngStream& rng) const;

 private:
  double xbar_;
  double se_;
  IntervalHypothesis hyp_;
  double p_in_ = 0.0;
  double tau_ = 0.0;
  // Probability that an inside draw comes from the tau h f part.
  double bump_share_ = 0.0;
  // Cumulative table of h f on an even grid over [lo, hi].
  std::vector<double> grid_;
  std::vector<double> cum_;
  std::vector<double> dens_;
};

}  // namespace sharpfid::normal_known
