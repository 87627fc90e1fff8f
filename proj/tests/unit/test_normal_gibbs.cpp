#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "sharpfid/models/normal_direct.hpp"
#include "sharpfid/models/normal_gibbs.hpp"
#include "sharpfid/numerics/rng.hpp"
#include "sharpfid/numerics/stats.hpp"

using namespace sharpfid;
using namespace sharpfid::normal_gibbs;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

const NormalSummary kData{9, 2.1, 3.0};
const IntervalHypothesis kHyp = IntervalHypothesis::symmetric(0, 0.2, 0.33);
// A sharp hypothesis with zero prior mass: the mu update is then the plain
// fiducial N(xbar, sigma^2 / n) and the conditionals are compatible.
const IntervalHypothesis kNoHyp(0, 0, 0.0);

GpdSpec smoothed() { return GpdSpec::smoothed(BumpDensity::beta_on_interval(4, 4, -0.2, 0.2)); }

double inv_gamma_pdf(double v, double a, double b) {
  return std::exp(a * std::log(b) - std::lgamma(a) - (a + 1) * std::log(v) - b / v);
}

std::vector<double> thin(const std::vector<double>& x, std::size_t every) {
  std::vector<double> out;
  for (std::size_t i = 0; i < x.size(); i += every) out.push_back(x[i]);
  return out;
}

double jump(const DensityHandle& d, double at) {
  const double a = d.pdf(at - 1e-10), b = d.pdf(at + 1e-10);
  return std::abs(a - b) / std::max(a, b);
}
}  // namespace

TEST_CASE("scan order names") {
  for (auto scan : {ScanOrder::mu_then_sigma, ScanOrder::sigma_then_mu, ScanOrder::uniform_random}) {
    CHECK(parse_scan_order(to_string(scan)) == scan);
  }
  CHECK(parse_scan_order("fixed:σμ") == ScanOrder::sigma_then_mu);
  CHECK_THROWS_AS(parse_scan_order("fixed"), ValidationError);
}

TEST_CASE("sigma^2 full conditional") {
  SUBCASE("scale at mu = 0") {
    const auto d = conditional_sigma2(0.0, kData);
    for (double v : {3.0, 12.0, 40.0}) {
      CHECK(d.pdf(v) == doctest::Approx(inv_gamma_pdf(v, 4.5, 55.845)).epsilon(1e-12));
    }
    CHECK(d.cdf(12.0) == doctest::Approx(oracle::inverse_gamma_cdf(12.0, 4.5, 55.845)).epsilon(1e-6));
    numerics::RngStream rng(3, 0);
    std::vector<double> v(200000);
    for (auto& x : v) x = d.sample(rng);
    const double se = std::sqrt(oracle::sample_var(v) / v.size());
    CHECK(std::abs(oracle::sample_mean(v) - 55.845 / 3.5) < 4 * se);
  }
  SUBCASE("scale at mu = xbar") {
    const auto d = conditional_sigma2(2.1, kData);
    CHECK(d.pdf(9.0) == doctest::Approx(inv_gamma_pdf(9.0, 4.5, 36.0)).epsilon(1e-12));
    CHECK(d.mass(0.0, kInf) == doctest::Approx(1.0));
  }
}

TEST_CASE("mu full conditional") {
  SUBCASE("no prior mass on the hypothesis gives the fiducial normal") {
    const auto d = conditional_mu(3.0, kData, kNoHyp, GpdSpec::flat());
    for (double mu : {-1.0, 0.5, 2.1, 4.0}) {
      CHECK(d.pdf(mu) == doctest::Approx(oracle::normal_pdf(mu - 2.1)).epsilon(1e-10));
    }
  }
  SUBCASE("huge sigma") {
    // Both components flatten: the inside likelihood tends to the normal
    // density at zero and the outside one to the N(0, 2 se^2) density at zero,
    // so the evidence ratio tends to sqrt(2).
    const double limit = 0.33 * std::sqrt(2.0) / (0.33 * std::sqrt(2.0) + 0.67);
    const auto d = conditional_mu(1e6, kData, kHyp, GpdSpec::flat());
    CHECK(std::abs(d.mixture_weight() - limit) < 1e-3);
    const auto ds = conditional_mu(1e6, kData, kHyp, smoothed());
    CHECK(std::abs(ds.mixture_weight() - limit) < 1e-3);
  }
  SUBCASE("smoothed conditional is continuous at the interval ends") {
    for (double sigma : {1.5, 3.0, 6.0}) {
      const auto d = conditional_mu(sigma, kData, kHyp, smoothed());
      CHECK(jump(d, -0.2) < 1e-6);
      CHECK(jump(d, 0.2) < 1e-6);
    }
  }
  CHECK_THROWS_AS(conditional_mu(0.0, kData, kHyp, GpdSpec::flat()), ValidationError);
}

TEST_CASE("chain bookkeeping") {
  GibbsOptions o;
  o.n_samples = 0;
  CHECK(gibbs_run(kData, kHyp, smoothed(), o).size() == 0);

  o.n_samples = 3000;
  o.burn_in = 200;
  o.seed = 11;
  for (auto scan : {ScanOrder::mu_then_sigma, ScanOrder::sigma_then_mu, ScanOrder::uniform_random}) {
    o.scan = scan;
    const auto c = gibbs_run(kData, kHyp, smoothed(), o);
    CHECK(c.size() == 3000);
    CHECK(c.sigma.size() == 3000);
    bool positive = true;
    for (double s : c.sigma) positive = positive && s > 0.0;
    CHECK(positive);
    // Burn-in states are the first ones of an otherwise identical chain.
    GibbsOptions full = o;
    full.burn_in = 0;
    full.n_samples = 3200;
    const auto f = gibbs_run(kData, kHyp, smoothed(), full);
    CHECK(std::equal(c.mu.begin(), c.mu.end(), f.mu.begin() + 200));
    CHECK(std::equal(c.sigma.begin(), c.sigma.end(), f.sigma.begin() + 200));
  }
  const auto a = gibbs_run(kData, kHyp, smoothed(), o);
  const auto b = gibbs_run(kData, kHyp, smoothed(), o);
  CHECK(a.mu == b.mu);
  CHECK_THROWS_AS(ChainOutput{}.probability_mu_in(0, 1), EmptySample);
}

TEST_CASE("random scan moves one coordinate per recorded state") {
  GibbsOptions o;
  o.n_samples = 5000;
  o.scan = ScanOrder::uniform_random;
  const auto c = gibbs_run(kData, kHyp, smoothed(), o);
  std::size_t both = 0, mu_moves = 0;
  for (std::size_t i = 1; i < c.size(); ++i) {
    const bool dm = c.mu[i] != c.mu[i - 1];
    const bool ds = c.sigma[i] != c.sigma[i - 1];
    both += dm && ds;
    mu_moves += dm;
  }
  CHECK(both == 0);
  CHECK(std::abs(mu_moves / 4999.0 - 0.5) < 0.03);
}

TEST_CASE("fiducial mu update targets the joint fiducial density") {
  GibbsOptions o;
  o.n_samples = 500'000;
  o.mu_update = MuUpdate::fiducial;
  o.seed = 7;
  const auto c = gibbs_run(kData, kHyp, smoothed(), o);
  const auto mu = thin(c.mu, 5);
  std::vector<double> v;
  for (double s : thin(c.sigma, 5)) v.push_back(s * s);
  REQUIRE(mu.size() == 100'000);

  const double sc = 1.0;  // s / sqrt(n)
  const oracle::TabulatedCdf t_cdf([](double t) { return oracle::t_pdf(t, 8); }, -80, 80, 160000,
                                   oracle::t_cdf(-80, 8));
  const double d_mu = oracle::ks_distance(mu, [&](double x) { return t_cdf((x - 2.1) / sc); });
  CHECK(oracle::ks_p_value(d_mu, mu.size()) > 0.01);

  const oracle::TabulatedCdf ig_cdf([](double x) { return x > 0 ? inv_gamma_pdf(x, 4.0, 36.0) : 0.0; }, 0,
                                    4000, 400000);
  const double d_v = oracle::ks_distance(v, ig_cdf);
  CHECK(oracle::ks_p_value(d_v, v.size()) > 0.01);
}

TEST_CASE("scan diagnostic") {
  SUBCASE("compatible conditionals give indistinguishable correlations") {
    const auto d = scan_order_diagnostic(kData, kNoHyp, GpdSpec::flat(), 50'000, 5, 17);
    CHECK(d.replicates_mu_sigma.size() == 5);
    CHECK(d.replicates_sigma_mu.size() == 5);
    CHECK(d.p_value > 0.01);
    CHECK(std::abs(d.corr_mu_sigma) < 0.02);
    CHECK(std::abs(d.corr_sigma_mu) < 0.02);
    CHECK(d.difference == doctest::Approx(d.corr_sigma_mu - d.corr_mu_sigma));
  }
  CHECK_THROWS_AS(scan_order_diagnostic(kData, kHyp, smoothed(), 0, 5, 1), ValidationError);
  CHECK_THROWS_AS(scan_order_diagnostic(kData, kHyp, smoothed(), 100, 1, 1), ValidationError);
}

TEST_CASE("conditional discrepancy") {
  GibbsOptions o;
  o.n_samples = 200'000;
  o.mu_update = MuUpdate::fiducial;
  o.seed = 23;
  const auto c = gibbs_run(kData, kNoHyp, GpdSpec::flat(), o);
  const std::vector<double> edges{2.8, 2.9, 3.0, 3.1, 3.2};
  const auto r = conditional_discrepancy(c, kData, kNoHyp, GpdSpec::flat(), edges);
  REQUIRE(r.size() == 4);
  for (const auto& slice : r) {
    CHECK(slice.count >= 500);
    // Bonferroni over the four slices.
    CHECK(slice.ks_p_value > 0.01 / 4);
  }
  const auto inc = gibbs_run(kData, kHyp, smoothed(), {.n_samples = 50'000, .seed = 2});
  const auto ri = conditional_discrepancy(inc, kData, kHyp, smoothed(), edges, 100);
  for (const auto& slice : ri) {
    CHECK(slice.ks_distance >= 0.0);
    CHECK(slice.ks_distance <= 1.0);
  }
  const std::vector<double> far{50.0, 60.0};
  CHECK_THROWS_AS(conditional_discrepancy(c, kData, kNoHyp, GpdSpec::flat(), far), InsufficientSlicePopulation);
  const std::vector<double> bad{3.0, 2.0};
  CHECK_THROWS_AS(conditional_discrepancy(c, kData, kNoHyp, GpdSpec::flat(), bad), ValidationError);
}

TEST_CASE("Gelman-Rubin from overdispersed starts") {
  const std::vector<std::uint64_t> seeds{101, 202, 303, 404};
  GibbsOptions base;
  base.n_samples = 100'000;
  const auto r = gelman_rubin_study(kData, kHyp, smoothed(), seeds, true, base);
  CHECK(r.r_hat_mu < 1.05);
  CHECK(r.r_hat_sigma < 1.05);
  const auto f = gelman_rubin_study(kData, kNoHyp, GpdSpec::flat(), seeds, true, base);
  CHECK(f.r_hat_mu < 1.02);
  CHECK(f.r_hat_sigma < 1.02);

  const std::vector<std::uint64_t> same{5, 5};
  CHECK_THROWS_AS(gelman_rubin_study(kData, kHyp, smoothed(), same, true, base), ValidationError);
  const std::vector<std::uint64_t> one{5};
  CHECK_THROWS_AS(gelman_rubin_study(kData, kHyp, smoothed(), one, true, base), ValidationError);
}

TEST_CASE("random scan marginals agree with the fixed scans") {
  GibbsOptions o;
  o.seed = 31;
  o.scan = ScanOrder::mu_then_sigma;
  o.n_samples = 200'000;
  const auto fixed_a = gibbs_run(kData, kHyp, smoothed(), o);
  o.scan = ScanOrder::sigma_then_mu;
  o.stream = 1;
  const auto fixed_b = gibbs_run(kData, kHyp, smoothed(), o);
  o.scan = ScanOrder::uniform_random;
  o.stream = 2;
  o.n_samples = 400'000;
  const auto random = gibbs_run(kData, kHyp, smoothed(), o);

  const auto rm = thin(random.mu, 8), rs = thin(random.sigma, 8);
  for (const auto* fixed : {&fixed_a, &fixed_b}) {
    CHECK(numerics::ks_two_sample(thin(fixed->mu, 4), rm).p_value > 0.01);
    CHECK(numerics::ks_two_sample(thin(fixed->sigma, 4), rs).p_value > 0.01);
  }
}

TEST_CASE("post-data probability with sigma unknown") {
  using normal_direct::SmoothingLevel;
  GibbsOptions o;
  o.n_samples = 200'000;
  o.seed = 9;
  const double direct = post_prob_unknown_sigma(kData, kHyp, smoothed(), SmoothingLevel::marginal, o);
  CHECK(direct == doctest::Approx(normal_direct::post_prob_direct(kData, kHyp, smoothed()).p_in));
  const double gibbs = post_prob_unknown_sigma(kData, kHyp, smoothed(), SmoothingLevel::conditional, o);
  CHECK(gibbs == doctest::Approx(gibbs_run(kData, kHyp, smoothed(), o).probability_mu_in(-0.2, 0.2)));
  CHECK(std::abs(gibbs - 0.105) < 0.01);
  CHECK(direct < gibbs);
}
