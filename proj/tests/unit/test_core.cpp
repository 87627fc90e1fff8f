#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "sharpfid/core/post_data.hpp"
#include "sharpfid/core/types.hpp"
#include "sharpfid/numerics/rng.hpp"

using namespace sharpfid;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

DensityHandle normal_on(double lo, double hi) {
  ContinuousDensity d;
  const double z = oracle::normal_cdf(hi) - oracle::normal_cdf(lo);
  d.pdf = [=](double x) { return x < lo || x > hi ? 0.0 : oracle::normal_pdf(x) / z; };
  d.support = {{lo, hi}};
  return DensityHandle::continuous(d);
}

DensityHandle normal_outside(double lo, double hi) {
  ContinuousDensity d;
  const double z = 1.0 - (oracle::normal_cdf(hi) - oracle::normal_cdf(lo));
  d.pdf = [=](double x) { return x > lo && x < hi ? 0.0 : oracle::normal_pdf(x) / z; };
  d.support = {{-kInf, lo}, {hi, kInf}};
  return DensityHandle::continuous(d);
}

DensityHandle beta_6_12() {
  ContinuousDensity d;
  d.pdf = [](double u) { return oracle::beta_pdf(u, 6, 12); };
  d.support = {{0.0, 1.0}};
  return DensityHandle::continuous(d);
}
}  // namespace

TEST_CASE("post_data_probability examples") {
  CHECK(post_data_probability(0.5, 2.0, 2.0) == doctest::Approx(0.5));
  CHECK(post_data_probability(0.0, 3.0, 1.0) == 0.0);
  CHECK(post_data_probability(1.0, 0.0, 1.0) == 1.0);
  CHECK(post_data_probability(0.0, 0.0, 0.0) == 0.0);
  CHECK(post_data_probability(1.0, 0.0, 0.0) == 1.0);
  CHECK_THROWS_AS(post_data_probability(0.5, 0.0, 0.0), IndeterminateEvidence);
  // Normal mean, z = 1.96: m_in / m_out = sqrt(2) exp(-1.96^2 / 2) with unit-variance n = 1.
  const double ratio = std::sqrt(2.0) * std::exp(-1.96 * 1.96 / 4.0);
  CHECK(post_data_probability(0.5, ratio, 1.0) ==
        doctest::Approx(1.0 / (1.0 + 1.0 / ratio)).epsilon(1e-14));
  CHECK_THROWS_AS(post_data_probability(1.5, 1.0, 1.0), ValidationError);
  CHECK_THROWS_AS(post_data_probability(0.5, -1.0, 1.0), ValidationError);
}

TEST_CASE("post_data_probability is invariant to a common evidence scale") {
  for (double p0 : {0.1, 0.3, 0.5, 0.9}) {
    for (double ratio : {1e-4, 0.2, 1.0, 7.0}) {
      const double base = post_data_probability(p0, ratio, 1.0);
      for (double c : {1e-200, 1e-3, 7.0, 1e250}) {
        CHECK(std::abs(post_data_probability(p0, c * ratio, c) - base) < 1e-12);
        const double lc = std::log(c) + 900.0;
        CHECK(std::abs(post_data_probability_log(p0, std::log(ratio) + lc, lc) - base) < 1e-12);
      }
    }
  }
}

TEST_CASE("post_data_probability is monotone") {
  double prev = -1.0;
  for (double p0 = 0.0; p0 <= 1.0; p0 += 0.05) {
    const double p = post_data_probability(p0, 0.7, 1.3);
    CHECK(p >= prev);
    prev = p;
  }
  prev = -1.0;
  for (double r = 1e-3; r < 1e3; r *= 1.7) {
    const double p = post_data_probability(0.4, r, 1.0);
    CHECK(p > prev);
    prev = p;
  }
}

TEST_CASE("mixture_post_density") {
  const auto in = normal_on(-0.5, 0.5);
  const auto out = normal_outside(-0.5, 0.5);
  SUBCASE("weights carry over") {
    const auto m = mixture_post_density({in, out}, 0.3);
    CHECK(m.mass(-0.5, 0.5) == doctest::Approx(0.3).epsilon(1e-9));
    CHECK(m.mass(-kInf, kInf) == doctest::Approx(1.0).epsilon(1e-9));
    // Stay off the closed endpoints, where both components have density.
    const double inside = oracle::simpson([&](double x) { return m.pdf(x); }, -0.5 + 1e-13, 0.5 - 1e-13);
    CHECK(inside == doctest::Approx(0.3).epsilon(1e-8));
  }
  SUBCASE("p_in = 1 and p_in = 0 recover the components") {
    const auto all_in = mixture_post_density({in, out}, 1.0);
    const auto all_out = mixture_post_density({in, out}, 0.0);
    for (double x : {-2.0, -0.3, 0.0, 0.4, 1.5}) {
      CHECK(all_in.pdf(x) == doctest::Approx(in.pdf(x)));
      CHECK(all_out.pdf(x) == doctest::Approx(out.pdf(x)));
    }
  }
  SUBCASE("atom on the boundary of the outside component is allowed") {
    const auto m = mixture_post_density({DensityHandle::atom(0.0), normal_outside(0.0, 0.0)}, 0.4);
    CHECK(m.atom_mass() == doctest::Approx(0.4));
    CHECK(m.mass(-kInf, kInf) == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("overlapping supports are rejected") {
    CHECK_THROWS_AS(mixture_post_density({normal_on(-1, 1), normal_outside(-0.5, 0.5)}, 0.5),
                    SupportOverlap);
    CHECK_THROWS_AS(mixture_post_density({in, out}, 1.2), ValidationError);
  }
}

TEST_CASE("apply_gpd_weight on a density") {
  const auto base = beta_6_12();
  SUBCASE("flat over everything is the identity") {
    const auto d = apply_gpd_weight(base, GpdSpec::flat(), numerics::Region::everything());
    for (double u : {0.1, 0.3, 0.6}) CHECK(d.pdf(u) == doctest::Approx(base.pdf(u)).epsilon(1e-8));
  }
  SUBCASE("flat over a window truncates and renormalizes") {
    const auto d = apply_gpd_weight(base, GpdSpec::flat(), numerics::Region::inside(0.49, 0.51));
    const double z = oracle::beta_mass(6, 12, 0.49, 0.51);
    CHECK(d.pdf(0.5) == doctest::Approx(oracle::beta_pdf(0.5, 6, 12) / z).epsilon(1e-7));
    CHECK(d.pdf(0.3) == 0.0);
    CHECK(d.mass(0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("smoothed with tau = 0 equals flat") {
    const auto bump = BumpDensity::beta_on_interval(4, 4, 0.2, 0.4);
    const auto a = apply_gpd_weight(base, GpdSpec::smoothed(bump, 0.0), numerics::Region::inside(0.2, 0.4));
    const auto b = apply_gpd_weight(base, GpdSpec::flat(), numerics::Region::inside(0.2, 0.4));
    for (double u : {0.21, 0.3, 0.39}) CHECK(a.pdf(u) == doctest::Approx(b.pdf(u)).epsilon(1e-9));
  }
  SUBCASE("smoothed weight matches direct computation") {
    const auto bump = BumpDensity::beta_on_interval(4, 4, 0.2, 0.4);
    const auto gpd = GpdSpec::smoothed(bump, 3.0);
    const auto d = apply_gpd_weight(base, gpd, numerics::Region::inside(0.2, 0.4));
    auto w = [&](double u) { return (1.0 + 3.0 * bump(u)) * oracle::beta_pdf(u, 6, 12); };
    const double z = oracle::simpson(w, 0.2, 0.4);
    CHECK(d.pdf(0.33) == doctest::Approx(w(0.33) / z).epsilon(1e-7));
  }
  SUBCASE("idempotent for flat weights") {
    const auto r = numerics::Region::inside(0.2, 0.4);
    const auto once = apply_gpd_weight(base, GpdSpec::flat(), r);
    const auto twice = apply_gpd_weight(once, GpdSpec::flat(), r);
    for (double u : {0.25, 0.35}) CHECK(twice.pdf(u) == doctest::Approx(once.pdf(u)).epsilon(1e-8));
  }
  SUBCASE("zero mass") {
    CHECK_THROWS_AS(apply_gpd_weight(base, GpdSpec::flat(), numerics::Region::inside(1.5, 2.0)),
                    NumericalError);
  }
}

TEST_CASE("apply_gpd_weight on a sample") {
  std::vector<double> v{0.1, 0.25, 0.3, 0.35, 0.8};
  const auto s = WeightedSample<double>::unit(v);
  const auto r = numerics::Region::inside(0.2, 0.4);
  const auto flat = apply_gpd_weight(s, GpdSpec::flat(), r);
  CHECK(flat.size() == 3);
  for (double w : flat.weights()) CHECK(w == doctest::Approx(1.0 / 3.0));
  const auto out = apply_gpd_weight(s, GpdSpec::flat(), numerics::Region::outside(0.2, 0.4));
  CHECK(out.values() == std::vector<double>{0.1, 0.8});
  CHECK_THROWS_AS(apply_gpd_weight(s, GpdSpec::flat(), numerics::Region::inside(0.5, 0.7)), ZeroMass);
}

TEST_CASE("interval hypothesis validation") {
  CHECK(IntervalHypothesis(0.0, 0.0, 0.5).is_sharp());
  CHECK_THROWS_AS(IntervalHypothesis(1.0, 0.0, 0.5), ValidationError);
  CHECK_THROWS_AS(IntervalHypothesis(0.0, 1.0, 1.5), ValidationError);
  CHECK_THROWS_AS(IntervalHypothesis(0.0, 1.0, -0.1), ValidationError);
  const auto h = IntervalHypothesis::symmetric(2.0, 0.5, 0.3);
  CHECK(h.lo == 1.5);
  CHECK(h.hi == 2.5);
}

TEST_CASE("bump densities") {
  SUBCASE("beta on an interval") {
    const auto h = BumpDensity::beta_on_interval(4, 4, -0.2, 0.2);
    CHECK(h(-0.2) == 0.0);
    CHECK(h(0.2) == 0.0);
    CHECK(h(0.5) == 0.0);
    CHECK(oracle::simpson([&](double x) { return h(x); }, -0.2, 0.2) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(h.peak() == doctest::Approx(h(0.0)).epsilon(1e-12));
    double prev = 0.0;
    for (int i = 0; i <= 40; ++i) {
      const double x = -0.2 + 0.01 * i;
      if (i <= 20) CHECK(h(x) >= prev);
      else CHECK(h(x) <= prev);
      prev = h(x);
    }
  }
  SUBCASE("log-scale bump on a ratio") {
    const double eps = 0.045;
    const auto h = BumpDensity::log_scale_beta_on_ratio(4, 4, eps);
    CHECK(h.lo() == doctest::Approx(1.0 / (1.0 + eps)));
    CHECK(h.hi() == doctest::Approx(1.0 + eps));
    CHECK(h(h.lo()) == 0.0);
    CHECK(h(h.hi()) == 0.0);
    for (double r : {0.97, 0.99, 1.01, 1.03}) CHECK(h(r) == doctest::Approx(h(1.0 / r)).epsilon(1e-12));
    CHECK(oracle::simpson([&](double x) { return h(x); }, h.lo(), h.hi()) ==
          doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK_THROWS_AS(BumpDensity::beta_on_interval(4, 4, 0.3, 0.3), ValidationError);
  CHECK_THROWS_AS(BumpDensity::beta_on_interval(0.5, 4, 0.0, 1.0), ValidationError);
}

TEST_CASE("GPD weight") {
  const auto bump = BumpDensity::beta_on_interval(4, 4, 0.0, 1.0);
  CHECK(GpdSpec::flat().weight(0.3) == 1.0);
  CHECK(GpdSpec::smoothed(bump, 2.0).weight(0.5) == doctest::Approx(1.0 + 2.0 * bump(0.5)));
  CHECK(GpdSpec::smoothed(bump, 2.0).weight(0.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(GpdSpec::smoothed(bump).weight(0.5), ValidationError);
  CHECK_THROWS_AS(GpdSpec::smoothed(bump, -1.0), ValidationError);
}

TEST_CASE("importance estimate with flat weights is a likelihood ratio") {
  // Four draws, two inside; likelihoods chosen so that m_in / m_out = 3.
  std::vector<std::uint8_t> inside{1, 1, 0, 0};
  std::vector<double> bump(4, 0.0);
  std::vector<double> ll{std::log(3.0), std::log(3.0), 0.0, 0.0};
  const auto e = estimate_by_importance({inside, bump, ll}, 0.25, GpdSpec::flat());
  CHECK(e.p_in == doctest::Approx(0.25 * 3.0 / (0.25 * 3.0 + 0.75)));
  CHECK(e.n_inside == 2);
  double total = 0.0;
  for (double w : e.mixture_weights) total += w;
  CHECK(total == doctest::Approx(1.0));
  CHECK(e.ess > 1.0);
  CHECK(e.ess <= 4.0);
}

TEST_CASE("post-data result helpers") {
  PostDataResult r;
  r.p_in = 0.25;
  r.p_out = 0.75;
  r.density_in = normal_on(-0.5, 0.5);
  r.density_out = normal_outside(-0.5, 0.5);
  CHECK(r.p_in + r.p_out == doctest::Approx(1.0));
  CHECK(r.probability_of(-0.5, 0.5) == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(r.probability_of(-kInf, kInf) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("weighted sample validation") {
  CHECK_THROWS_AS(WeightedSample<double>({1.0, 2.0}, {1.0}), ValidationError);
  CHECK_THROWS_AS(WeightedSample<double>({1.0}, {-1.0}), ValidationError);
  CHECK_THROWS_AS(WeightedSample<double>({1.0}, {0.0}), ZeroMass);
}

TEST_CASE("density handle sampling follows the pdf") {
  const auto d = beta_6_12();
  numerics::RngStream rng(3, 0);
  std::vector<double> x(20000);
  for (auto& v : x) v = d.sample(rng);
  const double dist = oracle::ks_distance(x, [](double u) { return oracle::beta_mass(6, 12, 0, u, 400); });
  CHECK(oracle::ks_p_value(dist, x.size()) > 0.01);
  CHECK(DensityHandle::atom(2.0).sample(rng) == 2.0);
}
