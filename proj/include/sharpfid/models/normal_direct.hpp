#pragma once

#include <utility>

#include "sharpfid/core/summaries.hpp"
#include "sharpfid/core/types.hpp"
#include "sharpfid/numerics/roots.hpp"

namespace sharpfid::normal_direct {

/// Where the smoothing weight 1 + tau h is applied when sigma is unknown:
/// to each conditional density of mu given sigma (the Gibbs route) or to the
/// marginal fiducial density of mu (the direct route).
enum class SmoothingLevel { conditional, marginal };

/// Joint fiducial density of (mu, sigma):
/// sigma^2 ~ Inv-Gamma((n-1)/2, (n-1)s^2/2) and mu | sigma ~ N(xbar, sigma^2/n).
class JointFiducialNormal {
 public:
  explicit JointFiducialNormal(const NormalSummary& s);

  const NormalSummary& summary() const noexcept { return s_; }

  /// Density in (mu, sigma), not (mu, sigma^2).
  double pdf(double mu, double sigma) const;
  double log_pdf(double mu, double sigma) const;

  /// Non-standardised t_{n-1}(xbar, s / sqrt(n)).
  double mu_marginal_pdf(double mu) const;
  double mu_marginal_cdf(double mu) const;
  double mu_scale() const noexcept { return scale_; }

  double sigma_marginal_pdf(double sigma) const;
  double sigma2_marginal_cdf(double sigma2) const;

  /// Density of sigma given mu: sigma^2 | mu ~ Inv-Gamma(n/2, S(mu)/2).
  double sigma_conditional_pdf(double sigma, double mu) const;

  /// (mu, sigma)
  std::pair<double, double> sample(numerics::RngStream& rng) const;

 private:
  NormalSummary s_;
  double scale_;
};

JointFiducialNormal joint_fS(const NormalSummary& s);

/// log of the likelihood of the data at (mu, sigma) averaged over
/// sigma | mu under the fiducial conditional, in closed form.
double log_evidence_given_mu(const NormalSummary& s, double mu);

/// log of the same average taken over the whole joint fiducial density.
double log_evidence_total(const NormalSummary& s);

numerics::LinearTauModel tau_model(const NormalSummary& s, const IntervalHypothesis& hyp,
                                   const BumpDensity& bump);

/// Post-data probability of the hypothesis on mu. density_in / density_out
/// are the two components of the post-data density of mu; for a smoothed GPD
/// tau is chosen for continuity of that marginal.
PostDataResult post_prob_direct(const NormalSummary& s, const IntervalHypothesis& hyp,
                                const GpdSpec& gpd);

/// Post-data density of mu alone.
DensityHandle marginal_post_density(const NormalSummary& s, const IntervalHypothesis& hyp,
                                    const GpdSpec& gpd);

/// p(mu, sigma | x) = p(mu | x) f_S(sigma | mu, x).
class JointPostDensity {
 public:
  JointPostDensity(const NormalSummary& s, PostDataResult marginal);

  double pdf(double mu, double sigma) const;
  DensityHandle mu_marginal() const { return result_.mixture(); }
  /// Integrates the joint over mu by quadrature.
  double sigma_marginal_pdf(double sigma) const;
  const PostDataResult& result() const noexcept { return result_; }
  std::pair<double, double> sample(numerics::RngStream& rng) const;

 private:
  JointFiducialNormal fiducial_;
  PostDataResult result_;
};

JointPostDensity joint_post_density(const NormalSummary& s, const IntervalHypothesis& hyp,
                                    const GpdSpec& gpd);

}  // namespace sharpfid::normal_direct
