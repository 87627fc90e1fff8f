#include <cmath>
#include <vector>

#include "doctest.h"
#include "fs_oracle.hpp"
#include "oracles.hpp"
#include "sharpfid/models/binomial.hpp"
#include "sharpfid/numerics/stats.hpp"

using namespace sharpfid;
using namespace sharpfid::binomial;
using oracle::FsOracle;

namespace {

// p_in from the oracle density: evidence is the likelihood averaged over each
// conditioned component.
double oracle_p_in(int x, int n, double lo, double hi, double p0) {
  const FsOracle f{x, n};
  // Simpson sums of f and L f over one set of nodes.
  auto both = [&](double a, double b, int panels) {
    const double h = (b - a) / panels;
    double sf = 0.0, slf = 0.0;
    for (int i = 0; i <= panels; ++i) {
      const double w = (i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      const double p = a + i * h;
      const double d = f.pdf(p);
      sf += w * d;
      slf += w * d * oracle::binomial_pmf(x, n, p);
    }
    return std::pair{sf * h / 3.0, slf * h / 3.0};
  };
  const auto [z_in, l_in] = both(lo, hi, 40);
  const auto [z_left, l_left] = both(0.0, lo, 400);
  const auto [z_right, l_right] = both(hi, 1.0, 400);
  const double m_in = l_in / z_in;
  const double m_out = (l_left + l_right) / (z_left + z_right);
  return p0 * m_in / (p0 * m_in + (1 - p0) * m_out);
}

McOptions mc(std::size_t samples, std::uint64_t seed = 1) {
  McOptions o;
  o.samples = samples;
  o.seed = seed;
  return o;
}

const IntervalHypothesis kFig4{0.49, 0.51, 0.3};

}  // namespace

TEST_CASE("phi_binomial") {
  CHECK(phi_binomial(1e-12, 0.3, 16) == 0);
  for (double g : {0.01, 0.5, 0.99}) CHECK(phi_binomial(g, 0.0, 16) == 0);
  CHECK(phi_binomial(0.5, 1.0, 16) == 16);
  // Median count by scanning the CDF.
  int median = 0;
  while (oracle::binomial_cdf(median, 16, 0.5) <= 0.5) ++median;
  CHECK(phi_binomial(0.5, 0.5, 16) == median);
  CHECK(median == 8);
  CHECK_THROWS_AS(phi_binomial(0.0, 0.5, 16), ValidationError);
  CHECK_THROWS_AS(phi_binomial(0.5, 1.5, 16), ValidationError);
}

TEST_CASE("preimage intervals") {
  SUBCASE("closed forms at the extremes") {
    const auto p0 = preimage_interval(0.5, 0, 16);
    CHECK(p0.lo == 0.0);
    CHECK(p0.hi == doctest::Approx(1.0 - std::pow(0.5, 1.0 / 16.0)).epsilon(1e-12));
    const auto pn = preimage_interval(0.5, 16, 16);
    CHECK(pn.lo == doctest::Approx(std::pow(0.5, 1.0 / 16.0)).epsilon(1e-12));
    CHECK(pn.hi == 1.0);
  }
  SUBCASE("edges solve the CDF equations") {
    for (double g : {0.05, 0.5, 0.93}) {
      const auto p = preimage_interval(g, 5, 16);
      CHECK(oracle::binomial_cdf(4, 16, p.lo) == doctest::Approx(g).epsilon(1e-10));
      CHECK(oracle::binomial_cdf(5, 16, p.hi) == doctest::Approx(g).epsilon(1e-10));
      // Interior points map back onto x.
      CHECK(phi_binomial(g, 0.5 * (p.lo + p.hi), 16) == 5);
    }
  }
  SUBCASE("consecutive counts tile the unit interval") {
    for (int n : {1, 5, 16, 40}) {
      for (int k = 1; k <= 99; ++k) {
        const double g = 0.01 * k;
        CHECK(preimage_interval(g, 0, n).lo == 0.0);
        CHECK(preimage_interval(g, n, n).hi == 1.0);
        for (int x = 0; x < n; ++x) {
          const auto a = preimage_interval(g, x, n);
          const auto b = preimage_interval(g, x + 1, n);
          CHECK(a.lo < a.hi);
          CHECK(std::abs(a.hi - b.lo) < 1e-10);
        }
      }
    }
  }
  CHECK_THROWS_AS(preimage_interval(0.5, 17, 16), ValidationError);
  CHECK_THROWS_AS(preimage_interval(1.0, 3, 16), ValidationError);
}

TEST_CASE("f_S oracle is a density") {
  const FsOracle f{5, 16};
  CHECK(oracle::simpson([&](double p) { return f.pdf(p); }, 0.0, 1.0, 400) ==
        doctest::Approx(1.0).epsilon(2e-4));
}

TEST_CASE("f_S sampler against the double-quadrature oracle") {
  const auto s = sample_fS({5, 16}, mc(1'000'000, 7));
  CHECK(oracle::fs_histogram_error(s.values(), 5, 16) < 0.03);
}

TEST_CASE("f_S moments") {
  SUBCASE("n = 1, x = 1 sits above one half") {
    // Here the double integral has the closed form f_S(pi) = pi log((1 + pi) / (1 - pi)).
    const FsOracle f{1, 1};
    for (double p : {0.2, 0.5, 0.8}) CHECK(f.pdf(p) == doctest::Approx(p * std::log((1 + p) / (1 - p))).epsilon(1e-5));
    // E[pi] with pi = 1 - u^2 to tame the log singularity at 1.
    const double mean = oracle::simpson([](double u) {
      if (u <= 0.0) return 0.0;
      const double p = 1.0 - u * u;
      return p * p * std::log((1 + p) / (u * u)) * 2.0 * u;
    }, 0.0, 1.0, 2000);
    CHECK(mean > 0.5);
    const auto s = sample_fS({1, 1}, mc(200'000, 3));
    const double se = std::sqrt(oracle::sample_var(s.values()) / s.size());
    CHECK(std::abs(oracle::sample_mean(s.values()) - mean) < 4 * se);
  }
  SUBCASE("n = 16, x = 8 is symmetric") {
    const auto s = sample_fS({8, 16}, mc(200'000, 4));
    const double se = std::sqrt(oracle::sample_var(s.values()) / s.size());
    CHECK(std::abs(oracle::sample_mean(s.values()) - 0.5) < 3 * se);
  }
}

TEST_CASE("f_S draws lie inside their preimage") {
  std::vector<double> pi(5000), lo(5000), hi(5000);
  for (int x : {0, 5, 12, 16}) {
    sample_fS_into({x, 16}, pi, 9, 0, lo, hi);
    for (std::size_t i = 0; i < pi.size(); ++i) {
      CHECK(lo[i] <= pi[i]);
      CHECK(pi[i] <= hi[i]);
    }
  }
}

TEST_CASE("sampling is deterministic and thread-count independent") {
  McOptions a = mc(100'000, 5), b = mc(100'000, 5);
  a.threads = 1;
  b.threads = 8;
  CHECK(sample_fS({5, 16}, a).values() == sample_fS({5, 16}, b).values());
  CHECK(sample_fS({5, 16}, a).values() != sample_fS({5, 16}, mc(100'000, 6)).values());
}

TEST_CASE("analyze agrees with the oracle probability") {
  for (int x : {5, 8}) {
    const auto r = analyze({x, 16}, kFig4, GpdSpec::flat(), mc(400'000, 11));
    const double expect = oracle_p_in(x, 16, 0.49, 0.51, 0.3);
    REQUIRE(r.mc_stderr.has_value());
    CHECK(std::abs(r.p_in - expect) < 4.0 * *r.mc_stderr);
  }
}

TEST_CASE("analyze properties") {
  SUBCASE("p0 = 0") {
    CHECK(analyze({5, 16}, {0.49, 0.51, 0.0}, GpdSpec::flat(), mc(20'000)).p_in == 0.0);
  }
  SUBCASE("balanced data raise the probability") {
    CHECK(oracle_p_in(8, 16, 0.49, 0.51, 0.3) > 0.3);
    CHECK(analyze({8, 16}, kFig4, GpdSpec::flat(), mc(200'000)).p_in > 0.3);
  }
  SUBCASE("reflection") {
    for (int x : {3, 5, 7}) {
      const auto a = analyze({x, 16}, kFig4, GpdSpec::flat(), mc(200'000, 2));
      const auto b = analyze({16 - x, 16}, kFig4, GpdSpec::flat(), mc(200'000, 2));
      CHECK(std::abs(a.p_in - b.p_in) < 1e-10);
    }
  }
  SUBCASE("decreasing away from one half") {
    double prev = 1.0;
    for (int x : {8, 7, 6, 5, 4, 3}) {
      const double p = analyze({x, 16}, kFig4, GpdSpec::flat(), mc(400'000, 3)).p_in;
      CHECK(p < prev);
      prev = p;
    }
  }
  SUBCASE("components") {
    const auto r = analyze({5, 16}, kFig4, GpdSpec::flat(), mc(200'000));
    CHECK(r.density_in.mass(0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.density_out.mass(0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.density_out.mass(0.4901, 0.5099) == 0.0);
    CHECK(r.mixture().mass(0.49, 0.51) == doctest::Approx(r.p_in).epsilon(1e-9));
    CHECK(*r.ess > 1e4);
  }
  SUBCASE("no draws inside") {
    CHECK_THROWS_AS(analyze({0, 16}, {0.49, 0.51, 0.3}, GpdSpec::flat(), mc(1000)), ZeroMass);
  }
  SUBCASE("smoothed GPD solves tau") {
    const auto bump = BumpDensity::beta_on_interval(4, 4, 0.49, 0.51);
    const auto r = analyze({5, 16}, kFig4, GpdSpec::smoothed(bump), mc(200'000));
    REQUIRE(r.tau_used.has_value());
    CHECK(*r.tau_used > 0.0);
  }
  CHECK_THROWS_AS(analyze({5, 16}, {0.4, 1.2, 0.3}, GpdSpec::flat(), mc(1000)), ValidationError);
  CHECK_THROWS_AS(BinomialCount(17, 16), ValidationError);
}
