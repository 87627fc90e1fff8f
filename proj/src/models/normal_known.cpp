#include "sharpfid/models/normal_known.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sharpfid/core/post_data.hpp"
#include "sharpfid/numerics/quadrature.hpp"
#include "sharpfid/numerics/samplers.hpp"
#include "sharpfid/numerics/special.hpp"

namespace sharpfid::normal_known {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSqrt2 = 1.41421356237309504880;

const numerics::QuadratureSpec kTight{1e-300, 1e-12, 1 << 14};

// log of 1 / (2 sqrt(pi) se): the integral of L(mu) N(mu; xbar, se^2) over the line.
double log_joint_scale(double se) { return -std::log(2.0 * std::sqrt(M_PI) * se); }

double log_normal_density(double x, double mean, double sd) {
  return numerics::normal_log_pdf((x - mean) / sd) - std::log(sd);
}

// log of int_lo^hi h(mu) N(mu; mean, sd^2) dmu, with the integrand shifted so
// that the interval can sit far in the tail without underflow.
double log_bump_integral(const BumpDensity& bump, double mean, double sd) {
  const double anchor = std::clamp(mean, bump.lo(), bump.hi());
  const double offset = log_normal_density(anchor, mean, sd);
  const double value = numerics::integrate(
      [&](double mu) { return bump(mu) * std::exp(log_normal_density(mu, mean, sd) - offset); },
      bump.lo(), bump.hi(), kTight);
  return std::log(value) + offset;
}

void validate(const IntervalHypothesis& hyp) {
  detail::require(hyp.lo <= hyp.hi, "normal-known: lo must not exceed hi");
  detail::require(hyp.prior_prob >= 0.0 && hyp.prior_prob <= 1.0,
                  "normal-known: prior outside [0, 1]");
}

bool is_whole_line(const IntervalHypothesis& hyp) { return hyp.lo == -kInf && hyp.hi == kInf; }

DensityHandle truncated_normal(double mean, double sd, const numerics::Region& region) {
  const double log_mass = numerics::normal_region_log_prob(mean, sd, region);
  if (log_mass < std::log(1e-300)) {
    throw ZeroRegionMass("normal-known: conditioning region has no probability");
  }
  ContinuousDensity d;
  if (region.side == numerics::Region::Side::inside) {
    d.support = {{region.lo, region.hi}};
  } else {
    d.support = {{-kInf, region.lo}, {region.hi, kInf}};
  }
  d.pdf = [=](double x) {
    if (!region.contains(x)) return 0.0;
    return std::exp(log_normal_density(x, mean, sd) - log_mass);
  };
  d.mass = [=](double a, double b) {
    double total = 0.0;
    for (const auto& piece : (region.side == numerics::Region::Side::inside
                                  ? std::vector<Interval>{{region.lo, region.hi}}
                                  : std::vector<Interval>{{-kInf, region.lo}, {region.hi, kInf}})) {
      const double lo = std::max(a, piece.lo);
      const double hi = std::min(b, piece.hi);
      if (lo < hi) {
        total += std::exp(numerics::normal_region_log_prob(mean, sd, numerics::Region::inside(lo, hi)) -
                          log_mass);
      }
    }
    return total;
  };
  d.sampler = [=](numerics::RngStream& rng) {
    return numerics::sample_truncated_normal(mean, sd, region, rng);
  };
  return DensityHandle::continuous(std::move(d));
}

}  // namespace

std::pair<DensityHandle, DensityHandle> fiducial_components(const NormalKnownSummary& s,
                                                            const IntervalHypothesis& hyp) {
  validate(hyp);
  const double se = s.se();
  if (is_whole_line(hyp)) {
    return {truncated_normal(s.xbar, se, numerics::Region::everything()), DensityHandle::empty()};
  }
  if (hyp.is_sharp()) {
    return {DensityHandle::atom(hyp.lo), truncated_normal(s.xbar, se, hyp.outside())};
  }
  return {truncated_normal(s.xbar, se, hyp.inside()), truncated_normal(s.xbar, se, hyp.outside())};
}

double Evidence::ratio() const { return std::exp(log_m_in - log_m_out); }

namespace {

// (a0, a1, b0, b1, z_out, m_out) on the log scale for the weight 1 + tau h.
// The b-terms integrate L times the weighted base density.
numerics::LinearTauModel::LogTerms linear_terms(const NormalKnownSummary& s,
                                                const IntervalHypothesis& hyp,
                                                const BumpDensity* bump) {
  const double se = s.se();
  const double half_sd = se / kSqrt2;
  const double c = log_joint_scale(se);
  numerics::LinearTauModel::LogTerms t{};
  t.log_a0 = numerics::normal_region_log_prob(s.xbar, se, hyp.inside());
  t.log_b0 = c + numerics::normal_region_log_prob(s.xbar, half_sd, hyp.inside());
  t.log_z_out = numerics::normal_region_log_prob(s.xbar, se, hyp.outside());
  t.log_m_out = c + numerics::normal_region_log_prob(s.xbar, half_sd, hyp.outside()) - t.log_z_out;
  if (bump) {
    t.log_a1 = log_bump_integral(*bump, s.xbar, se);
    t.log_b1 = c + log_bump_integral(*bump, s.xbar, half_sd);
  } else {
    t.log_a1 = -kInf;
    t.log_b1 = -kInf;
  }
  return t;
}

}  // namespace

Evidence predictive_evidence(const NormalKnownSummary& s, const IntervalHypothesis& hyp,
                             const GpdSpec& gpd) {
  validate(hyp);
  const double se = s.se();
  if (hyp.is_sharp()) {
    return {log_normal_density(s.xbar, hyp.lo, se), log_joint_scale(se)};
  }
  const BumpDensity* bump = gpd.is_flat() ? nullptr : &gpd.bump();
  const auto t = linear_terms(s, hyp, bump);
  const double tau = bump ? gpd.tau().value_or(-1.0) : 0.0;
  detail::require(tau >= 0.0, "predictive_evidence: smoothed GPD needs a fixed tau");
  const double log_num = bump ? numerics::log_add(t.log_b0, std::log(tau) + t.log_b1) : t.log_b0;
  const double log_den = bump ? numerics::log_add(t.log_a0, std::log(tau) + t.log_a1) : t.log_a0;
  return {log_num - log_den, t.log_m_out};
}

double post_prob_sharp(double z, double p0) {
  detail::require(p0 >= 0.0 && p0 <= 1.0, "post_prob_sharp: prior outside [0, 1]");
  // m_in / m_out = sqrt(2) exp(-z^2 / 2)
  return post_data_probability_log(p0, 0.5 * std::log(2.0) - 0.5 * z * z, 0.0);
}

double berger_sellke_lower_bound(double z, double p0) {
  detail::require(p0 > 0.0 && p0 < 1.0, "berger_sellke_lower_bound: prior must lie in (0, 1)");
  return post_data_probability_log(p0, -0.5 * z * z, 0.0);
}

numerics::LinearTauModel tau_model(const NormalKnownSummary& s, const IntervalHypothesis& hyp,
                                   const BumpDensity& bump) {
  validate(hyp);
  detail::require(!hyp.is_sharp(), "tau_model: needs an interval of positive length");
  return numerics::LinearTauModel(hyp.prior_prob, linear_terms(s, hyp, &bump));
}

PostDataResult analyze(const NormalKnownSummary& s, const IntervalHypothesis& hyp,
                       const GpdSpec& gpd) {
  validate(hyp);
  PostDataResult r;
  const double se = s.se();
  auto [in, out] = fiducial_components(s, hyp);
  if (is_whole_line(hyp)) {
    r.p_in = 1.0;
    r.p_out = 0.0;
    r.density_in = in;
    r.density_out = out;
    return r;
  }
  if (hyp.is_sharp() || gpd.is_flat()) {
    const Evidence ev = predictive_evidence(s, hyp, GpdSpec::flat());
    r.p_in = post_data_probability_log(hyp.prior_prob, ev.log_m_in, ev.log_m_out);
    r.p_out = 1.0 - r.p_in;
    r.log_evidence_ratio = ev.log_m_in - ev.log_m_out;
    r.density_in = in;
    r.density_out = out;
    return r;
  }

  const BumpDensity& bump = gpd.bump();
  const numerics::LinearTauModel model(hyp.prior_prob, linear_terms(s, hyp, &bump));
  double tau = 0.0;
  if (gpd.tau()) {
    tau = *gpd.tau();
  } else if (hyp.prior_prob > 0.0 && hyp.prior_prob < 1.0) {
    tau = numerics::solve_tau(model).tau;
  }
  r.tau_used = tau;
  r.p_in = model.p_in(tau);
  r.p_out = 1.0 - r.p_in;
  r.log_evidence_ratio = model.log_m_in(tau) - model.log_m_out();

  const auto terms = linear_terms(s, hyp, &bump);
  const double log_z_in = numerics::log_add(terms.log_a0, std::log(tau) + terms.log_a1);
  const double xbar = s.xbar;
  ContinuousDensity d;
  d.support = {{hyp.lo, hyp.hi}};
  d.pdf = [=](double mu) {
    if (mu < hyp.lo || mu > hyp.hi) return 0.0;
    return (1.0 + tau * bump(mu)) * std::exp(log_normal_density(mu, xbar, se) - log_z_in);
  };
  r.density_in = DensityHandle::continuous(std::move(d));
  r.density_out = out;
  return r;
}

MixtureSampler::MixtureSampler(double xbar, double se, const IntervalHypothesis& hyp,
                               const GpdSpec& gpd)
    : xbar_(xbar), se_(se), hyp_(hyp) {
  validate(hyp);
  detail::require(se > 0.0, "MixtureSampler: se must be positive");
  const double p0 = hyp.prior_prob;
  const NormalKnownSummary s = NormalKnownSummary::from_se(xbar, se);
  if (hyp.is_sharp() || gpd.is_flat()) {
    const Evidence ev = predictive_evidence(s, hyp, GpdSpec::flat());
    p_in_ = post_data_probability_log(p0, ev.log_m_in, ev.log_m_out);
    return;
  }
  // Simpson's rule on an even grid for the two h-weighted integrals; the same
  // grid holds the cumulative table for drawing from the h f part.
  constexpr int kCells = 256;
  const BumpDensity& bump = gpd.bump();
  const double half_sd = se / kSqrt2;
  const double anchor = std::clamp(xbar, hyp.lo, hyp.hi);
  const double off_a = log_normal_density(anchor, xbar, se);
  const double off_b = log_normal_density(anchor, xbar, half_sd);
  const double step = (hyp.hi - hyp.lo) / kCells;
  grid_.resize(kCells + 1);
  std::vector<double> fa(kCells + 1);
  double sa = 0.0;
  double sb = 0.0;
  for (int i = 0; i <= kCells; ++i) {
    const double mu = i == kCells ? hyp.hi : hyp.lo + i * step;
    const double h = bump(mu);
    grid_[i] = mu;
    fa[i] = h * std::exp(log_normal_density(mu, xbar, se) - off_a);
    const double fb = h * std::exp(log_normal_density(mu, xbar, half_sd) - off_b);
    const double coef = (i == 0 || i == kCells) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    sa += coef * fa[i];
    sb += coef * fb;
  }
  sa *= step / 3.0;
  sb *= step / 3.0;
  dens_ = fa;
  cum_.resize(kCells + 1);
  cum_[0] = 0.0;
  for (int i = 0; i < kCells; ++i) cum_[i + 1] = cum_[i] + 0.5 * step * (fa[i] + fa[i + 1]);

  const double c = log_joint_scale(se);
  numerics::LinearTauModel::LogTerms t{};
  t.log_a0 = numerics::normal_region_log_prob(xbar, se, hyp.inside());
  t.log_a1 = std::log(sa) + off_a;
  t.log_b0 = c + numerics::normal_region_log_prob(xbar, half_sd, hyp.inside());
  t.log_b1 = c + std::log(sb) + off_b;
  t.log_z_out = numerics::normal_region_log_prob(xbar, se, hyp.outside());
  t.log_m_out = c + numerics::normal_region_log_prob(xbar, half_sd, hyp.outside()) - t.log_z_out;
  const numerics::LinearTauModel model(p0, t);
  if (gpd.tau()) {
    tau_ = *gpd.tau();
  } else if (p0 > 0.0 && p0 < 1.0) {
    tau_ = numerics::solve_tau(model).tau;
  }
  p_in_ = model.p_in(tau_);
  const double bump_part = tau_ * std::exp(t.log_a1 - t.log_a0);
  bump_share_ = bump_part / (1.0 + bump_part);
}

double MixtureSampler::sample_inside(numerics::RngStream& rng) const {
  if (hyp_.is_sharp()) return hyp_.lo;
  if (bump_share_ > 0.0 && rng.uniform() < bump_share_) {
    // Invert the trapezoid cumulative table with a linear density in each cell.
    const double target = rng.uniform() * cum_.back();
    auto it = std::upper_bound(cum_.begin(), cum_.end(), target);
    std::size_t k = std::clamp<std::size_t>(static_cast<std::size_t>(it - cum_.begin()), 1,
                                            cum_.size() - 1) - 1;
    const double x0 = grid_[k];
    const double w = grid_[k + 1] - x0;
    const double f0 = dens_[k];
    const double f1 = dens_[k + 1];
    const double rest = target - cum_[k];
    // Solve f0 t + (f1 - f0) t^2 / (2 w) = rest for t in [0, w].
    const double slope = (f1 - f0) / w;
    double t;
    if (std::abs(slope) * w < 1e-12 * std::max(f0, f1)) {
      t = f0 > 0.0 ? rest / f0 : 0.5 * w;
    } else {
      const double disc = std::max(0.0, f0 * f0 + 2.0 * slope * rest);
      t = 2.0 * rest / (f0 + std::sqrt(disc));
    }
    return x0 + std::clamp(t, 0.0, w);
  }
  return numerics::sample_truncated_normal(xbar_, se_, hyp_.inside(), rng);
}

double MixtureSampler::sample(numerics::RngStream& rng) const {
  if (rng.uniform() < p_in_) return sample_inside(rng);
  return numerics::sample_truncated_normal(xbar_, se_, hyp_.outside(), rng);
}

}  // namespace sharpfid::normal_known
