#pragma once

#include <functional>
#include <utility>

namespace sharpfid::numerics {

struct Bracket {
  double lo;
  double hi;
};

/// Bisection on a sign-changing bracket. `tol` is absolute on the abscissa.
/// Throws BadBracket if f(lo) and f(hi) have the same strict sign.
double bisect(const std::function<double(double)>& f, Bracket bracket, double tol = 1e-12,
              int max_iter = 400);

/// Continuity model for the smoothed pre-data weight 1 + tau * h.
///
/// Every quantity is relative to one base density f: the inside mass
/// z_in(tau) = int_in (1 + tau h) f, the outside mass z_out = int_out f, and
/// the predictive evidences m_in(tau), m_out. At an interval endpoint h = 0,
/// so the mixture density is continuous at both endpoints iff
///   G(tau) = P_in(tau) / z_in(tau) - (1 - P_in(tau)) / z_out = 0.
class TauModel {
 public:
  virtual ~TauModel() = default;

  virtual double prior() const = 0;
  virtual double z_in(double tau) const = 0;
  virtual double z_out() const = 0;
  /// log m_in(tau) and log m_out; only their difference matters.
  virtual double log_m_in(double tau) const = 0;
  virtual double log_m_out() const = 0;

  /// Post-data probability of the inside hypothesis at this tau.
  double p_in(double tau) const;
  double continuity_gap(double tau) const;
};

/// The common case: the (1 + tau h) weighting is linear in tau, so
///   z_in(tau)          = a0 + tau a1
///   z_in(tau) m_in(tau) = b0 + tau b1
/// All inputs are logs so that far-tail evidence does not underflow; any
/// common offset in (a0, a1, z_out) or in (b0, b1, m_out) is harmless.
class LinearTauModel final : public TauModel {
 public:
  struct LogTerms {
    double log_a0;
    double log_a1;
    double log_b0;
    double log_b1;
    double log_z_out;
    double log_m_out;
  };

  LinearTauModel(double prior, LogTerms terms);

  double prior() const override { return prior_; }
  double z_in(double tau) const override;
  double z_out() const override { return z_out_; }
  double log_m_in(double tau) const override;
  double log_m_out() const override { return log_m_out_; }

 private:
  double prior_;
  double a0_, a1_, z_out_;  // rescaled by a common factor
  double b0_, b1_;          // rescaled by a common factor
  double log_b_scale_;
  double log_m_out_;
};

struct TauSolveReport {
  double tau = 0.0;
  double residual = 0.0;
  int iterations = 0;
  Bracket bracket{0.0, 0.0};
};

struct TauSolveOptions {
  double tau_max = 1e8;
  double rel_tol = 1e-10;
};

/// Finds tau >= 0 with G(tau) = 0. The bracket starts at [0, 1] and its upper
/// end doubles until G changes sign or tau_max is passed; then bisection.
/// Throws NoRoot (carrying G(0) and G(tau_max)) when there is no sign change.
TauSolveReport solve_tau(const TauModel& model, const TauSolveOptions& options = {});

}  // namespace sharpfid::numerics
