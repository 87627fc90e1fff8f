#include "sharpfid/core/post_data.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sharpfid/numerics/quadrature.hpp"
#include "sharpfid/numerics/stats.hpp"

namespace sharpfid {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_prior(double p0) {
  detail::require(p0 >= 0.0 && p0 <= 1.0, "post-data probability: prior outside [0, 1]");
}

// Region intersected with one support interval, as a list of pieces.
std::vector<Interval> clip(const Interval& s, const numerics::Region& region) {
  std::vector<Interval> out;
  auto add = [&](double lo, double hi) {
    lo = std::max(lo, s.lo);
    hi = std::min(hi, s.hi);
    if (lo < hi) out.push_back({lo, hi});
  };
  if (region.side == numerics::Region::Side::inside) {
    add(region.lo, region.hi);
  } else {
    add(-kInf, region.lo);
    add(region.hi, kInf);
  }
  return out;
}

}  // namespace

double post_data_probability(double p0, double m_in, double m_out) {
  require_prior(p0);
  detail::require(m_in >= 0.0 && m_out >= 0.0, "post_data_probability: negative evidence");
  if (p0 == 0.0) return 0.0;
  if (p0 == 1.0) return 1.0;
  if (m_in == 0.0 && m_out == 0.0) {
    throw IndeterminateEvidence("post_data_probability: both evidences are zero");
  }
  if (m_in == m_out) return p0;
  const double a = p0 * m_in;
  return a / (a + (1.0 - p0) * m_out);
}

double post_data_probability_log(double p0, double log_m_in, double log_m_out) {
  require_prior(p0);
  if (p0 == 0.0) return 0.0;
  if (p0 == 1.0) return 1.0;
  if (log_m_in == -kInf && log_m_out == -kInf) {
    throw IndeterminateEvidence("post_data_probability: both evidences are zero");
  }
  if (log_m_in == log_m_out) return p0;
  const double logit = std::log(p0) - std::log1p(-p0) + log_m_in - log_m_out;
  if (logit >= 0.0) return 1.0 / (1.0 + std::exp(-logit));
  const double e = std::exp(logit);
  return e / (1.0 + e);
}

DensityHandle mixture_post_density(const std::pair<DensityHandle, DensityHandle>& components,
                                   double p_in) {
  detail::require(p_in >= 0.0 && p_in <= 1.0, "mixture_post_density: p_in outside [0, 1]");
  const auto in = components.first.support();
  const auto out = components.second.support();
  if (overlap_length(in, out) > 1e-12) {
    throw SupportOverlap("mixture_post_density: component supports overlap");
  }
  return DensityHandle::mixture_unchecked(p_in, components.first, components.second);
}

DensityHandle apply_gpd_weight(const DensityHandle& base, const GpdSpec& gpd,
                               const numerics::Region& region) {
  detail::require(!base.is_atom() && !base.is_mixture() && !base.is_empty(),
                  "apply_gpd_weight: needs a continuous or histogram density");
  const bool weighted = region.side == numerics::Region::Side::inside && !gpd.is_flat();
  std::vector<Interval> support;
  for (const Interval& s : base.support()) {
    for (const Interval& piece : clip(s, region)) support.push_back(piece);
  }
  auto raw = [base, gpd, weighted](double x) {
    const double f = base.pdf(x);
    return weighted ? f * gpd.weight(x) : f;
  };
  double total = 0.0;
  for (const Interval& s : support) total += numerics::integrate(raw, s.lo, s.hi);
  if (!(total > 0.0)) throw ZeroMass("apply_gpd_weight: no mass left after weighting");
  ContinuousDensity d;
  d.support = support;
  d.pdf = [raw, total](double x) { return raw(x) / total; };
  return DensityHandle::continuous(std::move(d));
}

ImportanceEstimate estimate_by_importance(const ImportanceDraws& draws, double prior,
                                          const GpdSpec& gpd) {
  require_prior(prior);
  const std::size_t n = draws.inside.size();
  detail::require(draws.log_likelihood.size() == n && (gpd.is_flat() || draws.bump.size() == n),
                  "estimate_by_importance: draw arrays differ in length");
  if (n == 0) throw EmptySample("estimate_by_importance: no draws");

  ImportanceEstimate est;
  est.smoothed = !gpd.is_flat();
  const double shift = *std::max_element(draws.log_likelihood.begin(), draws.log_likelihood.end());
  // Sums in draw order, so equal inputs give bit-identical results.
  double a0 = 0.0, a1 = 0.0, b0 = 0.0, b1 = 0.0, c_out = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double l = std::exp(draws.log_likelihood[i] - shift);
    if (draws.inside[i]) {
      ++est.n_inside;
      a0 += 1.0;
      b0 += l;
      if (est.smoothed) {
        a1 += draws.bump[i];
        b1 += draws.bump[i] * l;
      }
    } else {
      ++est.n_outside;
      c_out += l;
    }
  }
  if (est.n_inside == 0) {
    throw ZeroMass("estimate_by_importance: no draws inside the hypothesis interval; increase N");
  }
  if (est.n_outside == 0) {
    throw ZeroMass("estimate_by_importance: no draws outside the hypothesis interval");
  }
  const double nd = static_cast<double>(n);
  a0 /= nd;
  a1 /= nd;
  b0 /= nd;
  b1 /= nd;
  const double z_out = static_cast<double>(est.n_outside) / nd;
  const double m_out = c_out / static_cast<double>(est.n_outside);

  if (est.smoothed) {
    if (gpd.tau()) {
      est.tau = *gpd.tau();
    } else if (prior > 0.0 && prior < 1.0) {
      const numerics::LinearTauModel model(
          prior, {std::log(a0), std::log(a1), std::log(b0), std::log(b1), std::log(z_out),
                  std::log(m_out)});
      est.tau = numerics::solve_tau(model).tau;
    }
  }
  const double z_in = a0 + est.tau * a1;
  est.log_m_in = std::log(b0 + est.tau * b1) - std::log(z_in) + shift;
  est.log_m_out = std::log(m_out) + shift;
  est.p_in = post_data_probability_log(prior, est.log_m_in, est.log_m_out);
  const double p_out = 1.0 - est.p_in;

  // Delta-method error: ratio estimator inside, plain mean outside.
  const double m_in_scaled = (b0 + est.tau * b1) / z_in;
  double var_in = 0.0;
  double var_out = 0.0;
  est.mixture_weights.resize(n);
  est.component_weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double l = std::exp(draws.log_likelihood[i] - shift);
    if (draws.inside[i]) {
      const double w = 1.0 + (est.smoothed ? est.tau * draws.bump[i] : 0.0);
      const double r = w * (l - m_in_scaled);
      var_in += r * r;
      est.component_weights[i] = w / (nd * z_in);
      est.mixture_weights[i] = est.p_in * est.component_weights[i];
    } else {
      var_out += (l - m_out) * (l - m_out);
      est.component_weights[i] = 1.0 / static_cast<double>(est.n_outside);
      est.mixture_weights[i] = p_out * est.component_weights[i];
    }
  }
  const double n_in = static_cast<double>(est.n_inside);
  const double n_o = static_cast<double>(est.n_outside);
  const double mean_w_in = z_in / a0;  // mean of w over inside draws
  const double rel_var_in =
      var_in / (n_in * n_in) / (mean_w_in * mean_w_in) / (m_in_scaled * m_in_scaled);
  const double rel_var_out = n_o > 1 ? var_out / (n_o * (n_o - 1.0)) / (m_out * m_out) : 0.0;
  est.mc_stderr = est.p_in * p_out * std::sqrt(rel_var_in + rel_var_out);
  est.ess = numerics::ess(est.mixture_weights);
  return est;
}

}  // namespace sharpfid
