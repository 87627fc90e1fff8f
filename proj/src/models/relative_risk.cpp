#include "sharpfid/models/relative_risk.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "sharpfid/core/post_data.hpp"
#include "sharpfid/models/binomial.hpp"
#include "sharpfid/numerics/parallel.hpp"
#include "sharpfid/numerics/samplers.hpp"
#include "sharpfid/numerics/special.hpp"
#include "sharpfid/numerics/stats.hpp"

namespace sharpfid::relative_risk {

RatioHypothesis::RatioHypothesis(double eps_, double prior_prob_)
    : eps(eps_), prior_prob(prior_prob_) {
  detail::require(std::isfinite(eps) && eps > 0.0,
                  "RatioHypothesis: eps must be positive and finite");
  detail::require(prior_prob >= 0.0 && prior_prob <= 1.0,
                  "RatioHypothesis: prior probability must lie in [0, 1]");
}

namespace {

constexpr std::uint64_t kControlStreams = 1'000'000;

enum class ArmModel { fiducial, jeffreys };

// Draws of one arm plus, for each draw, the interval its conditional law is
// truncated to and the Beta parameters of that law.
struct ArmDraws {
  std::vector<double> pi;
  std::vector<double> lo;
  std::vector<double> hi;
  double alpha = 1.0;
  double beta = 1.0;
};

ArmDraws draw_arm(const BinomialCount& arm, ArmModel model, const McOptions& options,
                  std::uint64_t stream_base) {
  ArmDraws d;
  d.pi.resize(options.samples);
  d.lo.resize(options.samples);
  d.hi.resize(options.samples);
  if (model == ArmModel::fiducial) {
    d.alpha = arm.x + 1.0;
    d.beta = arm.n - arm.x + 1.0;
    binomial::sample_fS_chunked(arm, options, stream_base, d.pi, d.lo, d.hi);
    return d;
  }
  d.alpha = arm.x + 0.5;
  d.beta = arm.n - arm.x + 0.5;
  std::fill(d.hi.begin(), d.hi.end(), 1.0);
  detail::require(options.chunks >= 1, "relative_risk: need at least one chunk");
  const auto n_chunks = static_cast<std::size_t>(options.chunks);
  numerics::parallel_chunks(n_chunks, options.threads, [&](std::size_t i) {
    const auto r = numerics::chunk_range(d.pi.size(), n_chunks, i);
    numerics::RngStream rng(options.seed, stream_base + i);
    for (std::size_t j = r.begin; j < r.end; ++j) {
      d.pi[j] = numerics::sample_truncated_beta(d.alpha, d.beta, 0.0, 1.0, rng);
    }
  });
  return d;
}

// Density of the ratio on one-sided bins next to an endpoint, with the
// treatment draw integrated out given its truncation interval and the control
// draw. Returns the relative jump between the fitted one-sided limits.
double endpoint_jump(double endpoint, bool inside_right, double bin_width, const ArmDraws& t,
                     std::span<const double> pi_c, double c_in, double c_out) {
  constexpr int kBins = 3;
  std::array<double, 2 * kBins + 1> edges{};
  for (int j = 0; j <= 2 * kBins; ++j) edges[j] = endpoint + (j - kBins) * bin_width;
  std::array<double, 2 * kBins> mass{};

  auto ib = [&](double u) { return numerics::ibeta(t.alpha, t.beta, u); };
  for (std::size_t i = 0; i < pi_c.size(); ++i) {
    const double c = pi_c[i];
    const double lo = t.lo[i];
    const double hi = t.hi[i];
    if (edges.back() * c <= lo || edges.front() * c >= hi) continue;
    const double b_lo = ib(lo);
    const double span = ib(hi) - b_lo;
    double prev = 0.0;
    for (int j = 0; j <= 2 * kBins; ++j) {
      const double u = std::clamp(edges[j] * c, lo, hi);
      double cur;
      if (span > 0.0) {
        cur = u <= lo ? 0.0 : (u >= hi ? 1.0 : (ib(u) - b_lo) / span);
      } else {
        cur = (u - lo) / (hi - lo);
      }
      if (j > 0) mass[j - 1] += cur - prev;
      prev = cur;
    }
  }

  // Joint log-linear fit: log d = b0 + b1 [right side] + b2 x.
  const double n = static_cast<double>(pi_c.size());
  std::array<std::array<double, 3>, 3> xtx{};
  std::array<double, 3> xty{};
  for (int j = 0; j < 2 * kBins; ++j) {
    const bool right = j >= kBins;
    const bool inside = right == inside_right;
    const double dens = (inside ? c_in : c_out) * mass[j] / n / bin_width;
    if (!(dens > 0.0)) throw ZeroMass("relative_risk: empty bin next to an interval endpoint");
    const std::array<double, 3> row{1.0, right ? 1.0 : 0.0, (j - kBins + 0.5) * bin_width};
    const double y = std::log(dens);
    for (int a = 0; a < 3; ++a) {
      xty[a] += row[a] * y;
      for (int b = 0; b < 3; ++b) xtx[a][b] += row[a] * row[b];
    }
  }
  // Gaussian elimination on the 3x3 normal equations.
  for (int p = 0; p < 3; ++p) {
    for (int r = p + 1; r < 3; ++r) {
      const double f = xtx[r][p] / xtx[p][p];
      for (int c = p; c < 3; ++c) xtx[r][c] -= f * xtx[p][c];
      xty[r] -= f * xty[p];
    }
  }
  std::array<double, 3> coef{};
  for (int p = 2; p >= 0; --p) {
    double s = xty[p];
    for (int c = p + 1; c < 3; ++c) s -= xtx[p][c] * coef[c];
    coef[p] = s / xtx[p][p];
  }
  return std::abs(std::expm1(coef[1]));
}

RelativeRiskResult run(const TwoArmCounts& counts, const RatioHypothesis& hyp,
                       const BumpShape& shape, const McOptions& options, ArmModel model) {
  detail::require(hyp.eps > 0.0, "relative_risk: eps must be positive");
  detail::require(options.samples >= 2, "relative_risk: need at least two samples");
  const ArmDraws t = draw_arm(counts.treatment(), model, options, 0);
  const ArmDraws c = draw_arm(counts.control(), model, options, kControlStreams);
  const GpdSpec gpd =
      GpdSpec::smoothed(BumpDensity::log_scale_beta_on_ratio(shape.alpha, shape.beta, hyp.eps));
  const BumpDensity& h = gpd.bump();

  const std::size_t n = options.samples;
  std::vector<double> rho(n), bump(n), loglik(n);
  std::vector<std::uint8_t> inside(n);
  for (std::size_t i = 0; i < n; ++i) {
    rho[i] = t.pi[i] / c.pi[i];
    inside[i] = rho[i] >= hyp.lo() && rho[i] <= hyp.hi();
    bump[i] = inside[i] ? h(rho[i]) : 0.0;
    loglik[i] = numerics::binomial_log_pmf(counts.e_t, counts.n_t, t.pi[i]) +
                numerics::binomial_log_pmf(counts.e_c, counts.n_c, c.pi[i]);
  }
  const ImportanceEstimate est =
      estimate_by_importance({inside, bump, loglik}, hyp.prior_prob, gpd);

  RelativeRiskResult r;
  r.n_inside = est.n_inside;
  r.ratio.p_in = est.p_in;
  r.ratio.p_out = 1.0 - est.p_in;
  r.ratio.tau_used = est.tau;
  r.ratio.mc_stderr = est.mc_stderr;
  r.ratio.ess = est.ess;
  r.ratio.log_evidence_ratio = est.log_m_in - est.log_m_out;

  std::vector<double> in_v, in_w, out_v, out_w;
  in_v.reserve(est.n_inside);
  in_w.reserve(est.n_inside);
  out_v.reserve(est.n_outside);
  out_w.reserve(est.n_outside);
  double z_in = 0.0;
  double range_lo = hyp.lo();
  double range_hi = hyp.hi();
  for (std::size_t i = 0; i < n; ++i) {
    if (inside[i]) {
      z_in += 1.0 + est.tau * bump[i];
      in_v.push_back(rho[i]);
      in_w.push_back(est.component_weights[i]);
    } else {
      range_lo = std::min(range_lo, rho[i]);
      range_hi = std::max(range_hi, rho[i]);
      out_v.push_back(rho[i]);
      out_w.push_back(est.component_weights[i]);
    }
  }
  z_in /= static_cast<double>(n);
  const double z_out = static_cast<double>(est.n_outside) / static_cast<double>(n);
  r.ratio.density_in = numerics::weighted_histogram(in_v, in_w, {std::nullopt, hyp.lo(), hyp.hi()});
  r.ratio.density_out =
      numerics::outside_histogram(out_v, out_w, hyp.lo(), hyp.hi(), range_lo, range_hi);
  r.pi_t = numerics::weighted_histogram(t.pi, est.mixture_weights, {std::nullopt, 0.0, 1.0});
  r.pi_c = numerics::weighted_histogram(c.pi, est.mixture_weights, {std::nullopt, 0.0, 1.0});

  // The smooth factor 1 + tau h is continuous and equals 1 at both endpoints,
  // so it is left out of the near-endpoint bins.
  const double c_in = est.p_in / z_in;
  const double c_out = (1.0 - est.p_in) / z_out;
  const double width = hyp.eps / 10.0;
  if (c_in > 0.0 && c_out > 0.0) {
    r.continuity.at_lo = endpoint_jump(hyp.lo(), true, width, t, c.pi, c_in, c_out);
    r.continuity.at_hi = endpoint_jump(hyp.hi(), false, width, t, c.pi, c_in, c_out);
  } else {
    // One component is absent, so the density drops to zero on one side.
    r.continuity = {1.0, 1.0};
  }
  return r;
}

}  // namespace

WeightedSample<std::pair<double, double>> sample_joint_fS(const TwoArmCounts& c,
                                                          const McOptions& options) {
  detail::require(options.samples >= 1, "sample_joint_fS: need at least one sample");
  std::vector<double> t(options.samples), k(options.samples);
  binomial::sample_fS_chunked(c.treatment(), options, 0, t);
  binomial::sample_fS_chunked(c.control(), options, kControlStreams, k);
  std::vector<std::pair<double, double>> pairs(options.samples);
  for (std::size_t i = 0; i < pairs.size(); ++i) pairs[i] = {t[i], k[i]};
  return WeightedSample<std::pair<double, double>>::unit(std::move(pairs));
}

RelativeRiskResult analyze(const TwoArmCounts& c, const RatioHypothesis& hyp,
                           const BumpShape& bump, const McOptions& options) {
  return run(c, hyp, bump, options, ArmModel::fiducial);
}

RelativeRiskResult jeffreys_approx(const TwoArmCounts& c, const RatioHypothesis& hyp,
                                   const BumpShape& bump, const McOptions& options) {
  return run(c, hyp, bump, options, ArmModel::jeffreys);
}

}  // namespace sharpfid::relative_risk
