#pragma once

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "sharpfid/core/density.hpp"
#include "sharpfid/error.hpp"
#include "sharpfid/numerics/samplers.hpp"

namespace sharpfid {

/// The special hypothesis theta in [lo, hi] together with its prior probability.
/// lo == hi is a sharp hypothesis.
struct IntervalHypothesis {
  double lo = 0.0;
  double hi = 0.0;
  double prior_prob = 0.5;

  IntervalHypothesis() = default;
  IntervalHypothesis(double lo, double hi, double prior_prob);

  /// [center - eps, center + eps]
  static IntervalHypothesis symmetric(double center, double eps, double prior_prob);

  bool is_sharp() const noexcept { return lo == hi; }
  numerics::Region inside() const { return numerics::Region::inside(lo, hi); }
  numerics::Region outside() const { return numerics::Region::outside(lo, hi); }
};

/// Continuous unimodal bump that vanishes at both ends of its interval.
class BumpDensity {
 public:
  /// Beta(alpha, beta) rescaled to [lo, hi].
  struct BetaOnInterval {
    double alpha = 4.0;
    double beta = 4.0;
    double lo = 0.0;
    double hi = 1.0;
  };
  /// Bump on a ratio rho whose log is Beta(alpha, beta) on [-log(1+eps), log(1+eps)].
  /// With alpha == beta, h(rho) = h(1/rho). Normalized to unit mass in rho.
  struct LogScaleBetaOnRatio {
    double alpha = 4.0;
    double beta = 4.0;
    double eps = 0.0;
  };

  static BumpDensity beta_on_interval(double alpha, double beta, double lo, double hi);
  static BumpDensity log_scale_beta_on_ratio(double alpha, double beta, double eps);

  double operator()(double theta) const;
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  /// Largest value of h on its interval.
  double peak() const noexcept { return peak_; }

  const std::variant<BetaOnInterval, LogScaleBetaOnRatio>& kind() const noexcept { return kind_; }

 private:
  explicit BumpDensity(std::variant<BetaOnInterval, LogScaleBetaOnRatio> kind);

  std::variant<BetaOnInterval, LogScaleBetaOnRatio> kind_;
  double lo_ = 0.0;
  double hi_ = 0.0;
  double log_norm_ = 0.0;
  double peak_ = 0.0;
};

/// Global pre-data weight on the inside of the hypothesis interval:
/// flat (neutral), or 1 + tau * h. An unset tau means "solve for continuity".
class GpdSpec {
 public:
  static GpdSpec flat() { return GpdSpec(); }
  static GpdSpec smoothed(BumpDensity bump, std::optional<double> tau = std::nullopt);

  bool is_flat() const noexcept { return !bump_.has_value(); }
  const BumpDensity& bump() const;
  std::optional<double> tau() const noexcept { return tau_; }

  /// 1 + tau * h(theta) (1 when flat); requires a fixed tau when smoothed.
  double weight(double theta) const;

 private:
  GpdSpec() = default;
  std::optional<BumpDensity> bump_;
  std::optional<double> tau_;
};

template <class Point>
class WeightedSample {
 public:
  WeightedSample() = default;
  WeightedSample(std::vector<Point> values, std::vector<double> weights)
      : values_(std::move(values)), weights_(std::move(weights)) {
    detail::require(values_.size() == weights_.size(), "WeightedSample: length mismatch");
    double total = 0.0;
    for (double w : weights_) {
      detail::require(w >= 0.0, "WeightedSample: negative weight");
      total += w;
    }
    if (!values_.empty() && !(total > 0.0)) throw ZeroMass("WeightedSample: zero total weight");
  }

  static WeightedSample unit(std::vector<Point> values) {
    std::vector<double> w(values.size(), 1.0);
    return WeightedSample(std::move(values), std::move(w));
  }

  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  const std::vector<Point>& values() const noexcept { return values_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

 private:
  std::vector<Point> values_;
  std::vector<double> weights_;
};

struct PostDataResult {
  double p_in = 0.0;
  double p_out = 1.0;
  DensityHandle density_in = DensityHandle::empty();
  DensityHandle density_out = DensityHandle::empty();
  std::optional<double> tau_used;
  std::optional<double> mc_stderr;
  std::optional<double> ess;
  /// log m_in - log m_out, the evidence ratio on the log scale.
  double log_evidence_ratio = 0.0;

  /// The full post-data density p_in * f_in + p_out * f_out.
  DensityHandle mixture() const;
  /// Post-data probability of an arbitrary closed interval [a, b].
  double probability_of(double a, double b) const;
};

}  // namespace sharpfid
