#include "sharpfid/core/types.hpp"

#include <cmath>

#include "sharpfid/core/summaries.hpp"
#include "sharpfid/numerics/quadrature.hpp"
#include "sharpfid/numerics/special.hpp"

namespace sharpfid {

IntervalHypothesis::IntervalHypothesis(double lo, double hi, double prior_prob)
    : lo(lo), hi(hi), prior_prob(prior_prob) {
  detail::require(!std::isnan(lo) && !std::isnan(hi), "IntervalHypothesis: NaN bound");
  detail::require(lo <= hi, "IntervalHypothesis: lo must not exceed hi");
  detail::require(prior_prob >= 0.0 && prior_prob <= 1.0,
                  "IntervalHypothesis: prior probability outside [0, 1]");
}

IntervalHypothesis IntervalHypothesis::symmetric(double center, double eps, double prior_prob) {
  detail::require(eps >= 0.0, "IntervalHypothesis: eps must be non-negative");
  return {center - eps, center + eps, prior_prob};
}

BumpDensity::BumpDensity(std::variant<BetaOnInterval, LogScaleBetaOnRatio> kind)
    : kind_(std::move(kind)) {}

BumpDensity BumpDensity::beta_on_interval(double alpha, double beta, double lo, double hi) {
  detail::require(alpha > 1.0 && beta > 1.0,
                  "BumpDensity: shapes must exceed 1 so the bump vanishes at both ends");
  detail::require(lo < hi && std::isfinite(lo) && std::isfinite(hi),
                  "BumpDensity: needs a finite interval of positive length");
  BumpDensity b(BetaOnInterval{alpha, beta, lo, hi});
  b.lo_ = lo;
  b.hi_ = hi;
  b.log_norm_ = -std::log(hi - lo);
  const double mode = (alpha - 1.0) / (alpha + beta - 2.0);
  b.peak_ = std::exp(numerics::beta_log_pdf(mode, alpha, beta) + b.log_norm_);
  return b;
}

BumpDensity BumpDensity::log_scale_beta_on_ratio(double alpha, double beta, double eps) {
  detail::require(alpha > 1.0 && beta > 1.0,
                  "BumpDensity: shapes must exceed 1 so the bump vanishes at both ends");
  detail::require(eps > 0.0 && std::isfinite(eps), "BumpDensity: eps must be positive");
  BumpDensity b(LogScaleBetaOnRatio{alpha, beta, eps});
  const double le = std::log1p(eps);
  b.lo_ = 1.0 / (1.0 + eps);
  b.hi_ = 1.0 + eps;
  // u = (log rho + le) / (2 le) is Beta(alpha, beta); mapping back to rho
  // without the 1/rho Jacobian keeps h(rho) = h(1/rho) for equal shapes, so
  // the constant restores unit mass in rho.
  const double c = numerics::integrate(
      [&](double u) {
        return std::exp(numerics::beta_log_pdf(u, alpha, beta) + (2.0 * u - 1.0) * le);
      },
      0.0, 1.0, {1e-14, 1e-12, 1 << 14});
  b.log_norm_ = -std::log(2.0 * le) - std::log(c);
  const double mode = (alpha - 1.0) / (alpha + beta - 2.0);
  b.peak_ = std::exp(numerics::beta_log_pdf(mode, alpha, beta) + b.log_norm_);
  return b;
}

double BumpDensity::operator()(double theta) const {
  if (!(theta > lo_ && theta < hi_)) return 0.0;
  if (const auto* k = std::get_if<BetaOnInterval>(&kind_)) {
    const double u = (theta - k->lo) / (k->hi - k->lo);
    return std::exp(numerics::beta_log_pdf(u, k->alpha, k->beta) + log_norm_);
  }
  const auto& k = std::get<LogScaleBetaOnRatio>(kind_);
  const double le = std::log1p(k.eps);
  const double u = (std::log(theta) + le) / (2.0 * le);
  if (!(u > 0.0 && u < 1.0)) return 0.0;
  return std::exp(numerics::beta_log_pdf(u, k.alpha, k.beta) + log_norm_);
}

GpdSpec GpdSpec::smoothed(BumpDensity bump, std::optional<double> tau) {
  if (tau) {
    detail::require(*tau >= 0.0 && std::isfinite(*tau), "GpdSpec: tau must be finite and >= 0");
  }
  GpdSpec g;
  g.bump_ = std::move(bump);
  g.tau_ = tau;
  return g;
}

const BumpDensity& GpdSpec::bump() const {
  if (!bump_) throw ValidationError("GpdSpec: flat weighting has no bump");
  return *bump_;
}

double GpdSpec::weight(double theta) const {
  if (!bump_) return 1.0;
  if (!tau_) throw ValidationError("GpdSpec: smoothed weight needs a tau (solve it first)");
  return 1.0 + *tau_ * (*bump_)(theta);
}

DensityHandle PostDataResult::mixture() const {
  return DensityHandle::mixture_unchecked(p_in, density_in, density_out);
}

double PostDataResult::probability_of(double a, double b) const { return mixture().mass(a, b); }

NormalKnownSummary::NormalKnownSummary(int n, double xbar, double sigma)
    : n(n), xbar(xbar), sigma(sigma) {
  detail::require(n >= 1, "NormalKnownSummary: n must be at least 1");
  detail::require(std::isfinite(xbar), "NormalKnownSummary: xbar must be finite");
  detail::require(sigma > 0.0 && std::isfinite(sigma), "NormalKnownSummary: sigma must be positive");
}

NormalSummary::NormalSummary(int n, double xbar, double s) : n(n), xbar(xbar), s(s) {
  detail::require(n >= 2, "NormalSummary: n must be at least 2");
  detail::require(std::isfinite(xbar), "NormalSummary: xbar must be finite");
  detail::require(s > 0.0 && std::isfinite(s), "NormalSummary: s must be positive");
}

BinomialCount::BinomialCount(int x, int n) : x(x), n(n) {
  detail::require(n >= 1, "BinomialCount: n must be at least 1");
  detail::require(x >= 0 && x <= n, "BinomialCount: x must lie in [0, n]");
}

TwoArmCounts::TwoArmCounts(int e_t, int n_t, int e_c, int n_c)
    : e_t(e_t), n_t(n_t), e_c(e_c), n_c(n_c) {
  detail::require(n_t >= 1 && n_c >= 1, "TwoArmCounts: arm sizes must be at least 1");
  detail::require(e_t >= 0 && e_t <= n_t, "TwoArmCounts: e_t must lie in [0, n_t]");
  detail::require(e_c >= 0 && e_c <= n_c, "TwoArmCounts: e_c must lie in [0, n_c]");
}

}  // namespace sharpfid
