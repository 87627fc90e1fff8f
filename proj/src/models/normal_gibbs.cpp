#include "sharpfid/models/normal_gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "sharpfid/models/normal_known.hpp"
#include "sharpfid/numerics/rng.hpp"
#include "sharpfid/numerics/samplers.hpp"
#include "sharpfid/numerics/special.hpp"
#include "sharpfid/numerics/stats.hpp"

namespace sharpfid::normal_gibbs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

std::string to_string(ScanOrder scan) {
  switch (scan) {
    case ScanOrder::mu_then_sigma:
      return "fixed:mu-sigma";
    case ScanOrder::sigma_then_mu:
      return "fixed:sigma-mu";
    case ScanOrder::uniform_random:
      return "random";
  }
  return "unknown";
}

ScanOrder parse_scan_order(const std::string& text) {
  if (text == "fixed:mu-sigma" || text == "fixed:μσ" || text == "fixed:musigma") {
    return ScanOrder::mu_then_sigma;
  }
  if (text == "fixed:sigma-mu" || text == "fixed:σμ" || text == "fixed:sigmamu") {
    return ScanOrder::sigma_then_mu;
  }
  if (text == "random") return ScanOrder::uniform_random;
  throw ValidationError("unknown scan order '" + text +
                        "' (expected fixed:mu-sigma, fixed:sigma-mu or random)");
}

double ChainOutput::probability_mu_in(double lo, double hi) const {
  if (mu.empty()) throw EmptySample("ChainOutput: no recorded states");
  const auto hits = std::count_if(mu.begin(), mu.end(), [&](double m) { return m >= lo && m <= hi; });
  return static_cast<double>(hits) / static_cast<double>(mu.size());
}

DensityHandle conditional_sigma2(double mu, const NormalSummary& s) {
  const double shape = 0.5 * s.n;
  const double scale = 0.5 * s.sum_sq(mu);
  ContinuousDensity d;
  d.support = {{0.0, kInf}};
  d.pdf = [=](double v) {
    if (!(v > 0.0)) return 0.0;
    return std::exp(shape * std::log(scale) - std::lgamma(shape) - (shape + 1.0) * std::log(v) -
                    scale / v);
  };
  d.mass = [=](double a, double b) {
    auto cdf = [&](double v) { return v <= 0.0 ? 0.0 : 1.0 - numerics::gamma_p(shape, scale / v); };
    return b == kInf ? 1.0 - cdf(std::max(a, 0.0)) : cdf(b) - cdf(std::max(a, 0.0));
  };
  d.sampler = [=](numerics::RngStream& rng) {
    return numerics::sample_inverse_gamma(shape, scale, rng);
  };
  return DensityHandle::continuous(std::move(d));
}

DensityHandle conditional_mu(double sigma, const NormalSummary& s, const IntervalHypothesis& hyp,
                             const GpdSpec& gpd) {
  detail::require(sigma > 0.0, "conditional_mu: sigma must be positive");
  return normal_known::analyze(NormalKnownSummary(s.n, s.xbar, sigma), hyp, gpd).mixture();
}

ChainOutput gibbs_run(const NormalSummary& s, const IntervalHypothesis& hyp, const GpdSpec& gpd,
                      const GibbsOptions& options) {
  ChainOutput out;
  out.burn_in = options.burn_in;
  out.scan = options.scan;
  out.seed = options.seed;
  if (options.n_samples == 0) return out;
  out.mu.reserve(options.n_samples);
  out.sigma.reserve(options.n_samples);

  numerics::RngStream rng(options.seed, options.stream);
  const double root_n = std::sqrt(static_cast<double>(s.n));
  double mu = options.mu0.value_or(s.xbar);
  double sigma = options.sigma0.value_or(s.s);
  detail::require(sigma > 0.0, "gibbs_run: starting sigma must be positive");

  auto update_sigma = [&] {
    sigma = std::sqrt(numerics::sample_inverse_gamma(0.5 * s.n, 0.5 * s.sum_sq(mu), rng));
  };
  auto update_mu = [&] {
    const double se = sigma / root_n;
    if (options.mu_update == MuUpdate::fiducial) {
      mu = s.xbar + se * numerics::normal_quantile(rng.uniform());
    } else {
      mu = normal_known::MixtureSampler(s.xbar, se, hyp, gpd).sample(rng);
    }
  };

  const std::size_t total = options.burn_in + options.n_samples;
  for (std::size_t t = 0; t < total; ++t) {
    switch (options.scan) {
      case ScanOrder::mu_then_sigma:
        update_mu();
        update_sigma();
        break;
      case ScanOrder::sigma_then_mu:
        update_sigma();
        update_mu();
        break;
      case ScanOrder::uniform_random:
        if (rng.uniform() < 0.5) {
          update_mu();
        } else {
          update_sigma();
        }
        break;
    }
    if (t >= options.burn_in) {
      out.mu.push_back(mu);
      out.sigma.push_back(sigma);
    }
  }
  return out;
}

ScanDiagnostic scan_order_diagnostic(const NormalSummary& s, const IntervalHypothesis& hyp,
                                     const GpdSpec& gpd, std::size_t n_samples,
                                     std::size_t replicates, std::uint64_t seed,
                                     std::size_t burn_in) {
  detail::require(n_samples >= 4, "scan_order_diagnostic: need at least 4 samples per run");
  detail::require(replicates >= 2, "scan_order_diagnostic: need at least 2 replicates");
  ScanDiagnostic d;
  std::vector<double> z_a, z_b;
  for (std::size_t r = 0; r < replicates; ++r) {
    for (ScanOrder scan : {ScanOrder::mu_then_sigma, ScanOrder::sigma_then_mu}) {
      GibbsOptions o;
      o.n_samples = n_samples;
      o.burn_in = burn_in;
      o.scan = scan;
      o.seed = seed;
      o.stream = 2 * r + (scan == ScanOrder::mu_then_sigma ? 0 : 1);
      const ChainOutput c = gibbs_run(s, hyp, gpd, o);
      const double corr = numerics::pearson(c.mu, c.sigma);
      if (scan == ScanOrder::mu_then_sigma) {
        d.replicates_mu_sigma.push_back(corr);
        z_a.push_back(numerics::fisher_z(corr));
      } else {
        d.replicates_sigma_mu.push_back(corr);
        z_b.push_back(numerics::fisher_z(corr));
      }
    }
  }
  d.corr_mu_sigma = numerics::mean(d.replicates_mu_sigma);
  d.corr_sigma_mu = numerics::mean(d.replicates_sigma_mu);
  d.difference = d.corr_sigma_mu - d.corr_mu_sigma;
  const double k = static_cast<double>(replicates);
  const double se = std::sqrt(numerics::variance(z_a) / k + numerics::variance(z_b) / k);
  d.z = (numerics::mean(z_b) - numerics::mean(z_a)) / se;
  d.p_value = std::erfc(std::abs(d.z) / std::sqrt(2.0));
  return d;
}

std::vector<SliceDiscrepancy> conditional_discrepancy(const ChainOutput& chain,
                                                      const NormalSummary& s,
                                                      const IntervalHypothesis& hyp,
                                                      const GpdSpec& gpd,
                                                      std::span<const double> sigma_edges,
                                                      std::size_t min_count) {
  detail::require(sigma_edges.size() >= 2, "conditional_discrepancy: need at least one slice");
  for (std::size_t i = 1; i < sigma_edges.size(); ++i) {
    detail::require(sigma_edges[i] > sigma_edges[i - 1],
                    "conditional_discrepancy: slice edges must increase");
  }
  std::vector<SliceDiscrepancy> out;
  for (std::size_t k = 0; k + 1 < sigma_edges.size(); ++k) {
    SliceDiscrepancy d;
    d.sigma_lo = sigma_edges[k];
    d.sigma_hi = sigma_edges[k + 1];
    std::vector<double> mus;
    for (std::size_t i = 0; i < chain.size(); ++i) {
      if (chain.sigma[i] >= d.sigma_lo && chain.sigma[i] < d.sigma_hi) mus.push_back(chain.mu[i]);
    }
    d.count = mus.size();
    if (d.count < min_count) {
      throw InsufficientSlicePopulation("conditional_discrepancy: slice [" +
                                        std::to_string(d.sigma_lo) + ", " +
                                        std::to_string(d.sigma_hi) + ") holds " +
                                        std::to_string(d.count) + " states");
    }
    const double mid = std::isfinite(d.sigma_hi) ? 0.5 * (d.sigma_lo + d.sigma_hi) : d.sigma_lo;
    const DensityHandle cond = conditional_mu(mid, s, hyp, gpd);
    // Tabulate the conditional CDF once; per-point quadrature would dominate.
    const auto [lo_it, hi_it] = std::minmax_element(mus.begin(), mus.end());
    constexpr int kGrid = 4096;
    const double lo = *lo_it;
    const double hi = *hi_it;
    std::vector<double> grid(kGrid + 1), cdf(kGrid + 1);
    grid[0] = lo;
    cdf[0] = cond.cdf(lo);
    for (int i = 1; i <= kGrid; ++i) {
      grid[i] = i == kGrid ? hi : lo + (hi - lo) * i / kGrid;
      cdf[i] = cdf[i - 1] + cond.mass(std::nextafter(grid[i - 1], kInf), grid[i]);
    }
    auto table_cdf = [&](double x) {
      if (x <= lo) return cdf[0];
      if (x >= hi) return cdf[kGrid];
      const double pos = (x - lo) / (hi - lo) * kGrid;
      const int j = std::min(static_cast<int>(pos), kGrid - 1);
      return cdf[j] + (pos - j) * (cdf[j + 1] - cdf[j]);
    };
    const auto ks = numerics::ks_one_sample(std::move(mus), table_cdf);
    d.ks_distance = ks.statistic;
    d.ks_p_value = ks.p_value;
    out.push_back(d);
  }
  return out;
}

GelmanRubinReport gelman_rubin_study(const NormalSummary& s, const IntervalHypothesis& hyp,
                                     const GpdSpec& gpd, std::span<const std::uint64_t> seeds,
                                     bool overdispersed_starts, const GibbsOptions& base) {
  detail::require(seeds.size() >= 2, "gelman_rubin_study: need at least two chains");
  const std::set<std::uint64_t> distinct(seeds.begin(), seeds.end());
  detail::require(distinct.size() == seeds.size(),
                  "gelman_rubin_study: repeated seeds give identical chains");
  const double k_max = static_cast<double>(seeds.size() - 1);
  const double spread = s.s / std::sqrt(static_cast<double>(s.n));
  std::vector<std::vector<double>> mus, sigmas;
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    GibbsOptions o = base;
    o.seed = seeds[k];
    if (overdispersed_starts) {
      const double pos = 2.0 * static_cast<double>(k) / k_max - 1.0;  // -1 .. 1
      o.mu0 = s.xbar + 4.0 * spread * pos;
      o.sigma0 = s.s * std::pow(2.0, pos);
    }
    ChainOutput c = gibbs_run(s, hyp, gpd, o);
    mus.push_back(std::move(c.mu));
    sigmas.push_back(std::move(c.sigma));
  }
  return {numerics::gelman_rubin(mus), numerics::gelman_rubin(sigmas)};
}

double post_prob_unknown_sigma(const NormalSummary& s, const IntervalHypothesis& hyp,
                               const GpdSpec& gpd, normal_direct::SmoothingLevel level,
                               const GibbsOptions& options) {
  if (level == normal_direct::SmoothingLevel::marginal) {
    return normal_direct::post_prob_direct(s, hyp, gpd).p_in;
  }
  GibbsOptions o = options;
  o.mu_update = MuUpdate::post_data;
  return gibbs_run(s, hyp, gpd, o).probability_mu_in(hyp.lo, hyp.hi);
}

}  // namespace sharpfid::normal_gibbs
