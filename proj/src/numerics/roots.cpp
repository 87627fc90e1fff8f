#include "sharpfid/numerics/roots.hpp"

#include <cmath>
#include <limits>

#include "sharpfid/error.hpp"
#include "sharpfid/numerics/special.hpp"

namespace sharpfid::numerics {

double bisect(const std::function<double(double)>& f, Bracket bracket, double tol, int max_iter) {
  double lo = bracket.lo;
  double hi = bracket.hi;
  double f_lo = f(lo);
  double f_hi = f(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if ((f_lo > 0.0) == (f_hi > 0.0)) throw BadBracket("bisect: no sign change on the bracket");
  for (int i = 0; i < max_iter && hi - lo > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = f(mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double TauModel::p_in(double tau) const {
  const double p0 = prior();
  if (p0 <= 0.0) return 0.0;
  if (p0 >= 1.0) return 1.0;
  // Logistic form of p0 m_in / (p0 m_in + (1 - p0) m_out).
  const double logit = std::log(p0) - std::log1p(-p0) + log_m_in(tau) - log_m_out();
  if (logit >= 0.0) return 1.0 / (1.0 + std::exp(-logit));
  const double e = std::exp(logit);
  return e / (1.0 + e);
}

double TauModel::continuity_gap(double tau) const {
  const double p = p_in(tau);
  return p / z_in(tau) - (1.0 - p) / z_out();
}

LinearTauModel::LinearTauModel(double prior, LogTerms t) : prior_(prior), log_m_out_(t.log_m_out) {
  detail::require(prior >= 0.0 && prior <= 1.0, "LinearTauModel: prior outside [0, 1]");
  const double a_scale = std::max({t.log_a0, t.log_a1, t.log_z_out});
  a0_ = std::exp(t.log_a0 - a_scale);
  a1_ = std::exp(t.log_a1 - a_scale);
  z_out_ = std::exp(t.log_z_out - a_scale);
  log_b_scale_ = std::max(t.log_b0, t.log_b1);
  b0_ = std::exp(t.log_b0 - log_b_scale_);
  b1_ = std::exp(t.log_b1 - log_b_scale_);
  if (!(a0_ > 0.0) || !(z_out_ > 0.0)) throw ZeroMass("LinearTauModel: empty inside or outside mass");
  // Rescaling the a-terms by exp(-a_scale) rescales z_in m_in by the same
  // factor; fold it into the b-side offset so m_in stays consistent.
  log_b_scale_ -= a_scale;
}

double LinearTauModel::z_in(double tau) const { return a0_ + tau * a1_; }

double LinearTauModel::log_m_in(double tau) const {
  return std::log(b0_ + tau * b1_) + log_b_scale_ - std::log(z_in(tau));
}

TauSolveReport solve_tau(const TauModel& model, const TauSolveOptions& options) {
  const double g0 = model.continuity_gap(0.0);
  TauSolveReport report;
  if (g0 == 0.0) return report;
  double hi = 1.0;
  double g_hi = model.continuity_gap(hi);
  int expansions = 0;
  while ((g_hi > 0.0) == (g0 > 0.0)) {
    if (hi >= options.tau_max) {
      throw NoRoot("solve_tau: continuity gap keeps one sign on [0, tau_max]", g0, g_hi);
    }
    hi = std::min(2.0 * hi, options.tau_max);
    g_hi = model.continuity_gap(hi);
    ++expansions;
  }
  double lo = hi > 1.0 ? 0.5 * hi : 0.0;
  double g_lo = model.continuity_gap(lo);
  report.bracket = {lo, hi};
  int it = 0;
  while (hi - lo > options.rel_tol * std::max(hi, 1e-300) && it < 2000) {
    const double mid = 0.5 * (lo + hi);
    const double g_mid = model.continuity_gap(mid);
    ++it;
    if (g_mid == 0.0) {
      lo = hi = mid;
      break;
    }
    if ((g_mid > 0.0) == (g_lo > 0.0)) {
      lo = mid;
      g_lo = g_mid;
    } else {
      hi = mid;
    }
  }
  report.tau = 0.5 * (lo + hi);
  report.residual = model.continuity_gap(report.tau);
  report.iterations = it + expansions;
  return report;
}

}  // namespace sharpfid::numerics
