#include "sharpfid/models/normal_direct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sharpfid/core/post_data.hpp"
#include "sharpfid/numerics/quadrature.hpp"
#include "sharpfid/numerics/samplers.hpp"
#include "sharpfid/numerics/special.hpp"

namespace sharpfid::normal_direct {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kHalfPi = 1.57079632679489661923;
const numerics::QuadratureSpec kTight{1e-300, 1e-11, 1 << 14};
// Density values for display and checks; the integrand carries a steep
// boundary layer that the tight tolerance cannot resolve.
const numerics::QuadratureSpec kDensity{1e-300, 1e-9, 1 << 14};

double log_inverse_gamma_pdf(double v, double shape, double scale) {
  return shape * std::log(scale) - std::lgamma(shape) - (shape + 1.0) * std::log(v) - scale / v;
}

// Integrates f over [lo, hi] (either end may be infinite) after the change
// of variable mu = center + width tan(theta), which turns the polynomial
// tails of t-type integrands into a bounded integrand on a finite range.
double integrate_tan(const std::function<double(double)>& f, double lo, double hi, double center,
                     double width, const numerics::QuadratureSpec& spec = kTight) {
  if (!(lo < hi)) return 0.0;
  const double t_lo = lo == -kInf ? -kHalfPi : std::atan((lo - center) / width);
  const double t_hi = hi == kInf ? kHalfPi : std::atan((hi - center) / width);
  return numerics::integrate(
      [&](double theta) {
        const double c = std::cos(theta);
        if (c <= 0.0) return 0.0;
        const double mu = center + width * std::tan(theta);
        return f(mu) * width / (c * c);
      },
      t_lo, t_hi, spec);
}

struct Piece {
  double lo;
  double hi;
};

std::vector<Piece> region_pieces(const numerics::Region& region) {
  if (region.side == numerics::Region::Side::inside) return {{region.lo, region.hi}};
  return {{-kInf, region.lo}, {region.hi, kInf}};
}

// log of int over `region` of weight(mu) exp(log_f(mu)), shifted at the
// point of the region closest to the mode so that far tails do not underflow.
double log_region_integral(const std::function<double(double)>& log_f,
                           const std::function<double(double)>& weight,
                           const numerics::Region& region, double mode, double width) {
  double best = -kInf;
  for (const Piece& p : region_pieces(region)) {
    if (p.lo < p.hi) best = std::max(best, log_f(std::clamp(mode, p.lo, p.hi)));
  }
  if (best == -kInf) return -kInf;
  double total = 0.0;
  for (const Piece& p : region_pieces(region)) {
    total += integrate_tan([&](double mu) { return weight(mu) * std::exp(log_f(mu) - best); },
                           p.lo, p.hi, mode, width);
  }
  return std::log(total) + best;
}

double log_t_region_prob(const NormalSummary& s, const numerics::Region& region) {
  const double df = s.n - 1.0;
  const double scale = s.s / std::sqrt(static_cast<double>(s.n));
  // Upper-tail form keeps precision when the region sits above the centre.
  auto upper = [&](double x) { return numerics::student_t_cdf(-(x - s.xbar) / scale, df); };
  auto lower = [&](double x) { return numerics::student_t_cdf((x - s.xbar) / scale, df); };
  double p;
  if (region.side == numerics::Region::Side::inside) {
    p = region.lo > s.xbar ? upper(region.lo) - upper(region.hi) : lower(region.hi) - lower(region.lo);
  } else {
    p = lower(region.lo) + upper(region.hi);
  }
  return std::log(p);
}

numerics::LinearTauModel::LogTerms linear_terms(const NormalSummary& s,
                                                const IntervalHypothesis& hyp,
                                                const BumpDensity* bump) {
  const JointFiducialNormal fid(s);
  const double width = fid.mu_scale();
  auto log_t = [&](double mu) { return std::log(fid.mu_marginal_pdf(mu)); };
  auto log_tl = [&](double mu) { return log_t(mu) + log_evidence_given_mu(s, mu); };
  auto one = [](double) { return 1.0; };
  numerics::LinearTauModel::LogTerms t{};
  t.log_a0 = log_t_region_prob(s, hyp.inside());
  t.log_z_out = log_t_region_prob(s, hyp.outside());
  t.log_b0 = log_region_integral(log_tl, one, hyp.inside(), s.xbar, width);
  t.log_m_out = log_region_integral(log_tl, one, hyp.outside(), s.xbar, width) - t.log_z_out;
  if (bump) {
    auto h = [bump](double mu) { return (*bump)(mu); };
    t.log_a1 = log_region_integral(log_t, h, hyp.inside(), s.xbar, width);
    t.log_b1 = log_region_integral(log_tl, h, hyp.inside(), s.xbar, width);
  } else {
    t.log_a1 = -kInf;
    t.log_b1 = -kInf;
  }
  return t;
}

DensityHandle t_component(const NormalSummary& s, const numerics::Region& region) {
  const double df = s.n - 1.0;
  const double scale = s.s / std::sqrt(static_cast<double>(s.n));
  const double xbar = s.xbar;
  const double log_mass = log_t_region_prob(s, region);
  if (!(log_mass > std::log(1e-300))) {
    throw ZeroRegionMass("normal-direct: conditioning region has no probability");
  }
  ContinuousDensity d;
  for (const Piece& p : region_pieces(region)) d.support.push_back({p.lo, p.hi});
  d.pdf = [=](double mu) {
    if (!region.contains(mu)) return 0.0;
    return numerics::student_t_pdf((mu - xbar) / scale, df) / scale * std::exp(-log_mass);
  };
  auto cdf = [=](double mu) { return numerics::student_t_cdf((mu - xbar) / scale, df); };
  d.mass = [=](double a, double b) {
    double total = 0.0;
    for (const Piece& p : region_pieces(region)) {
      const double lo = std::max(a, p.lo);
      const double hi = std::min(b, p.hi);
      if (lo < hi) total += cdf(hi) - cdf(lo);
    }
    return total * std::exp(-log_mass);
  };
  d.sampler = [=](numerics::RngStream& rng) {
    const double u = rng.uniform();
    double q;
    if (region.side == numerics::Region::Side::inside) {
      q = cdf(region.lo) + u * (cdf(region.hi) - cdf(region.lo));
    } else {
      const double left = cdf(region.lo);
      const double right = 1.0 - cdf(region.hi);
      const double t = u * (left + right);
      q = t < left ? t : cdf(region.hi) + (t - left);
    }
    q = std::clamp(q, 1e-300, 1.0 - 1e-16);
    double mu = xbar + scale * numerics::student_t_quantile(q, df);
    if (region.side == numerics::Region::Side::inside) mu = std::clamp(mu, region.lo, region.hi);
    return mu;
  };
  return DensityHandle::continuous(std::move(d));
}

}  // namespace

JointFiducialNormal::JointFiducialNormal(const NormalSummary& s)
    : s_(s), scale_(s.s / std::sqrt(static_cast<double>(s.n))) {
  detail::require(s.n >= 2 && s.s > 0.0, "JointFiducialNormal: need n >= 2 and s > 0");
}

double JointFiducialNormal::log_pdf(double mu, double sigma) const {
  if (!(sigma > 0.0)) return -kInf;
  const double v = sigma * sigma;
  const double log_normal = numerics::normal_log_pdf((mu - s_.xbar) / std::sqrt(v / s_.n)) -
                            0.5 * std::log(v / s_.n);
  return log_normal + std::log(sigma_marginal_pdf(sigma));
}

double JointFiducialNormal::pdf(double mu, double sigma) const { return std::exp(log_pdf(mu, sigma)); }

double JointFiducialNormal::mu_marginal_pdf(double mu) const {
  return numerics::student_t_pdf((mu - s_.xbar) / scale_, s_.n - 1.0) / scale_;
}

double JointFiducialNormal::mu_marginal_cdf(double mu) const {
  return numerics::student_t_cdf((mu - s_.xbar) / scale_, s_.n - 1.0);
}

double JointFiducialNormal::sigma_marginal_pdf(double sigma) const {
  if (!(sigma > 0.0)) return 0.0;
  const double shape = 0.5 * (s_.n - 1.0);
  const double scale = 0.5 * (s_.n - 1.0) * s_.s * s_.s;
  return 2.0 * sigma * std::exp(log_inverse_gamma_pdf(sigma * sigma, shape, scale));
}

double JointFiducialNormal::sigma2_marginal_cdf(double sigma2) const {
  if (!(sigma2 > 0.0)) return 0.0;
  const double shape = 0.5 * (s_.n - 1.0);
  const double scale = 0.5 * (s_.n - 1.0) * s_.s * s_.s;
  return 1.0 - numerics::gamma_p(shape, scale / sigma2);
}

double JointFiducialNormal::sigma_conditional_pdf(double sigma, double mu) const {
  if (!(sigma > 0.0)) return 0.0;
  return 2.0 * sigma *
         std::exp(log_inverse_gamma_pdf(sigma * sigma, 0.5 * s_.n, 0.5 * s_.sum_sq(mu)));
}

std::pair<double, double> JointFiducialNormal::sample(numerics::RngStream& rng) const {
  const double v = numerics::sample_inverse_gamma(0.5 * (s_.n - 1.0),
                                                  0.5 * (s_.n - 1.0) * s_.s * s_.s, rng);
  const double mu = s_.xbar + std::sqrt(v / s_.n) * numerics::normal_quantile(rng.uniform());
  return {mu, std::sqrt(v)};
}

JointFiducialNormal joint_fS(const NormalSummary& s) { return JointFiducialNormal(s); }

double log_evidence_given_mu(const NormalSummary& s, double mu) {
  // int (2 pi v)^(-n/2) exp(-S/(2v)) Inv-Gamma(v; n/2, S/2) dv
  const double n = s.n;
  return -0.5 * n * std::log(2.0 * M_PI) + std::lgamma(n) - std::lgamma(0.5 * n) -
         n * std::log(2.0) - 0.5 * n * std::log(0.5 * s.sum_sq(mu));
}

double log_evidence_total(const NormalSummary& s) {
  const double n = s.n;
  const double a = (n - 1.0) * s.s * s.s;
  return -0.5 * std::log(2.0) - 0.5 * n * std::log(2.0 * M_PI) + std::lgamma(n - 0.5) -
         std::lgamma(0.5 * (n - 1.0)) - 0.5 * (n - 1.0) * std::log(2.0) - 0.5 * n * std::log(a);
}

numerics::LinearTauModel tau_model(const NormalSummary& s, const IntervalHypothesis& hyp,
                                   const BumpDensity& bump) {
  detail::require(!hyp.is_sharp(), "tau_model: needs an interval of positive length");
  return numerics::LinearTauModel(hyp.prior_prob, linear_terms(s, hyp, &bump));
}

PostDataResult post_prob_direct(const NormalSummary& s, const IntervalHypothesis& hyp,
                                const GpdSpec& gpd) {
  detail::require(s.n >= 2 && s.s > 0.0, "normal-direct: need n >= 2 and s > 0");
  detail::require(std::isfinite(hyp.lo) && std::isfinite(hyp.hi),
                  "normal-direct: hypothesis bounds must be finite");
  PostDataResult r;
  if (hyp.is_sharp()) {
    const double log_in = log_evidence_given_mu(s, hyp.lo);
    const double log_out = log_evidence_total(s);
    r.p_in = post_data_probability_log(hyp.prior_prob, log_in, log_out);
    r.p_out = 1.0 - r.p_in;
    r.log_evidence_ratio = log_in - log_out;
    r.density_in = DensityHandle::atom(hyp.lo);
    r.density_out = t_component(s, numerics::Region::everything());
    return r;
  }
  const BumpDensity* bump = gpd.is_flat() ? nullptr : &gpd.bump();
  const auto terms = linear_terms(s, hyp, bump);
  const numerics::LinearTauModel model(hyp.prior_prob, terms);
  double tau = 0.0;
  if (bump) {
    if (gpd.tau()) {
      tau = *gpd.tau();
    } else if (hyp.prior_prob > 0.0 && hyp.prior_prob < 1.0) {
      tau = numerics::solve_tau(model).tau;
    }
    r.tau_used = tau;
  }
  r.p_in = model.p_in(tau);
  r.p_out = 1.0 - r.p_in;
  r.log_evidence_ratio = model.log_m_in(tau) - model.log_m_out();
  r.density_out = t_component(s, hyp.outside());
  if (!bump) {
    r.density_in = t_component(s, hyp.inside());
    return r;
  }
  const double log_z_in = numerics::log_add(terms.log_a0, std::log(tau) + terms.log_a1);
  const JointFiducialNormal fid(s);
  const BumpDensity h = *bump;
  ContinuousDensity d;
  d.support = {{hyp.lo, hyp.hi}};
  d.pdf = [=](double mu) {
    if (mu < hyp.lo || mu > hyp.hi) return 0.0;
    return (1.0 + tau * h(mu)) * fid.mu_marginal_pdf(mu) * std::exp(-log_z_in);
  };
  r.density_in = DensityHandle::continuous(std::move(d));
  return r;
}

DensityHandle marginal_post_density(const NormalSummary& s, const IntervalHypothesis& hyp,
                                    const GpdSpec& gpd) {
  return post_prob_direct(s, hyp, gpd).mixture();
}

JointPostDensity::JointPostDensity(const NormalSummary& s, PostDataResult marginal)
    : fiducial_(s), result_(std::move(marginal)) {}

double JointPostDensity::pdf(double mu, double sigma) const {
  return result_.mixture().pdf(mu) * fiducial_.sigma_conditional_pdf(sigma, mu);
}

double JointPostDensity::sigma_marginal_pdf(double sigma) const {
  const NormalSummary& s = fiducial_.summary();
  if (!(sigma > 0.0)) return 0.0;
  // Work relative to the sigma | mu density at mu = xbar, and within each
  // piece relative to its value at the point nearest xbar, so the integrand
  // stays O(1) even where the density itself nearly underflows.
  const double peak = fiducial_.sigma_conditional_pdf(sigma, s.xbar);
  if (!(peak > 0.0)) return 0.0;
  const double s0 = s.sum_sq(s.xbar);
  const double half_n = 0.5 * s.n;
  auto log_relative = [&](double mu) {
    const double d = s.sum_sq(mu) - s0;
    return half_n * std::log1p(d / s0) - d / (2.0 * sigma * sigma);
  };
  double total = 0.0;
  // Component by component, so no quadrature panel straddles an endpoint jump.
  for (const auto& [weight, comp] : {std::pair{result_.p_in, &result_.density_in},
                                     std::pair{result_.p_out, &result_.density_out}}) {
    if (!(weight > 0.0) || comp->is_empty()) continue;
    if (auto loc = comp->atom_location()) {
      total += weight * std::exp(log_relative(*loc));
      continue;
    }
    for (const Interval& piece : comp->support()) {
      if (!(piece.hi > piece.lo)) continue;
      const double anchor = log_relative(std::clamp(s.xbar, piece.lo, piece.hi));
      total += weight * std::exp(anchor) *
               integrate_tan(
                   [&](double mu) { return comp->pdf(mu) * std::exp(log_relative(mu) - anchor); },
                   piece.lo, piece.hi, s.xbar, sigma / std::sqrt(static_cast<double>(s.n)),
                   kDensity);
    }
  }
  return total * peak;
}

std::pair<double, double> JointPostDensity::sample(numerics::RngStream& rng) const {
  const double mu = result_.mixture().sample(rng);
  const NormalSummary& s = fiducial_.summary();
  const double v = numerics::sample_inverse_gamma(0.5 * s.n, 0.5 * s.sum_sq(mu), rng);
  return {mu, std::sqrt(v)};
}

JointPostDensity joint_post_density(const NormalSummary& s, const IntervalHypothesis& hyp,
                                    const GpdSpec& gpd) {
  return JointPostDensity(s, post_prob_direct(s, hyp, gpd));
}

}  // namespace sharpfid::normal_direct
