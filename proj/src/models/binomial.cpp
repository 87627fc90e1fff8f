#include "sharpfid/models/binomial.hpp"

#include <cmath>

#include "sharpfid/core/post_data.hpp"
#include "sharpfid/numerics/parallel.hpp"
#include "sharpfid/numerics/samplers.hpp"
#include "sharpfid/numerics/special.hpp"
#include "sharpfid/numerics/stats.hpp"

namespace sharpfid::binomial {

int phi_binomial(double gamma, double pi, int n) {
  detail::require(gamma > 0.0 && gamma < 1.0, "phi_binomial: gamma must lie in (0, 1)");
  detail::require(pi >= 0.0 && pi <= 1.0, "phi_binomial: pi must lie in [0, 1]");
  detail::require(n >= 1, "phi_binomial: n must be at least 1");
  for (int y = 0; y < n; ++y) {
    if (numerics::binomial_cdf(y, n, pi) > gamma) return y;
  }
  return n;
}

PreimageInterval preimage_interval(double gamma, int x, int n) {
  detail::require(gamma > 0.0 && gamma < 1.0, "preimage_interval: gamma must lie in (0, 1)");
  detail::require(n >= 1 && x >= 0 && x <= n, "preimage_interval: need 0 <= x <= n, n >= 1");
  // F(y; pi) = 1 - I_pi(y + 1, n - y) decreases in pi, so the two edges solve
  // F(x - 1; pi) = gamma and F(x; pi) = gamma.
  PreimageInterval p;
  p.gamma = gamma;
  p.lo = x == 0 ? 0.0 : numerics::ibetac_inv(x, n - x + 1, gamma);
  p.hi = x == n ? 1.0 : numerics::ibetac_inv(x + 1, n - x, gamma);
  return p;
}

namespace {

double draw(const BinomialCount& c, numerics::RngStream& rng, double* lo, double* hi) {
  // f_S(pi | x) is the mirror image of f_S(1 - pi | n - x). Counts above n/2
  // reuse the lower count's draws so that x and n - x see the same stream.
  if (2 * c.x > c.n) {
    const double mirrored = draw({c.n - c.x, c.n}, rng, hi, lo);
    if (lo) *lo = 1.0 - *lo;
    if (hi) *hi = 1.0 - *hi;
    return 1.0 - mirrored;
  }
  const PreimageInterval p = preimage_interval(rng.uniform(), c.x, c.n);
  if (lo) *lo = p.lo;
  if (hi) *hi = p.hi;
  return numerics::sample_truncated_beta(c.x + 1.0, c.n - c.x + 1.0, p.lo, p.hi, rng);
}

}  // namespace

double sample_fS_one(const BinomialCount& count, numerics::RngStream& rng) {
  return draw(count, rng, nullptr, nullptr);
}

void sample_fS_into(const BinomialCount& count, std::span<double> out, std::uint64_t seed,
                    std::uint64_t stream_id, std::span<double> lo_out, std::span<double> hi_out) {
  numerics::RngStream rng(seed, stream_id);
  const bool keep = !lo_out.empty();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = draw(count, rng, keep ? &lo_out[i] : nullptr, keep ? &hi_out[i] : nullptr);
  }
}

void sample_fS_chunked(const BinomialCount& count, const McOptions& options,
                       std::uint64_t stream_base, std::span<double> out,
                       std::span<double> lo_out, std::span<double> hi_out) {
  detail::require(options.chunks >= 1, "sample_fS: need at least one chunk");
  const auto n_chunks = static_cast<std::size_t>(options.chunks);
  numerics::parallel_chunks(n_chunks, options.threads, [&](std::size_t i) {
    const auto r = numerics::chunk_range(out.size(), n_chunks, i);
    const std::size_t len = r.end - r.begin;
    sample_fS_into(count, out.subspan(r.begin, len), options.seed, stream_base + i,
                   lo_out.empty() ? lo_out : lo_out.subspan(r.begin, len),
                   hi_out.empty() ? hi_out : hi_out.subspan(r.begin, len));
  });
}

WeightedSample<double> sample_fS(const BinomialCount& count, const McOptions& options) {
  std::vector<double> values(options.samples);
  sample_fS_chunked(count, options, 0, values, {}, {});
  return WeightedSample<double>::unit(std::move(values));
}

PostDataResult analyze(const BinomialCount& count, const IntervalHypothesis& hyp,
                       const GpdSpec& gpd, const McOptions& options) {
  detail::require(hyp.lo >= 0.0 && hyp.hi <= 1.0 && hyp.lo < hyp.hi,
                  "binomial: hypothesis interval must have positive length inside [0, 1]");
  detail::require(options.samples >= 2, "binomial: need at least two samples");
  std::vector<double> pi(options.samples);
  sample_fS_chunked(count, options, 0, pi, {}, {});

  std::vector<std::uint8_t> inside(pi.size());
  std::vector<double> bump(gpd.is_flat() ? 0 : pi.size());
  std::vector<double> loglik(pi.size());
  for (std::size_t i = 0; i < pi.size(); ++i) {
    inside[i] = pi[i] >= hyp.lo && pi[i] <= hyp.hi;
    if (!gpd.is_flat()) bump[i] = inside[i] ? gpd.bump()(pi[i]) : 0.0;
    loglik[i] = numerics::binomial_log_pmf(count.x, count.n, pi[i]);
  }
  const ImportanceEstimate est =
      estimate_by_importance({inside, bump, loglik}, hyp.prior_prob, gpd);

  std::vector<double> in_v, in_w, out_v, out_w;
  in_v.reserve(est.n_inside);
  in_w.reserve(est.n_inside);
  out_v.reserve(est.n_outside);
  out_w.reserve(est.n_outside);
  for (std::size_t i = 0; i < pi.size(); ++i) {
    (inside[i] ? in_v : out_v).push_back(pi[i]);
    (inside[i] ? in_w : out_w).push_back(est.component_weights[i]);
  }
  PostDataResult r;
  r.p_in = est.p_in;
  r.p_out = 1.0 - est.p_in;
  r.log_evidence_ratio = est.log_m_in - est.log_m_out;
  if (est.smoothed) r.tau_used = est.tau;
  r.mc_stderr = est.mc_stderr;
  r.ess = est.ess;
  r.density_in = numerics::weighted_histogram(in_v, in_w, {std::nullopt, hyp.lo, hyp.hi});
  r.density_out = numerics::outside_histogram(out_v, out_w, hyp.lo, hyp.hi, 0.0, 1.0);
  return r;
}

}  // namespace sharpfid::binomial
