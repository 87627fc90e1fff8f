#include "sharpfid/numerics/quadrature.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "sharpfid/error.hpp"

namespace sharpfid::numerics {

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
using Gauss = boost::math::quadrature::gauss<double, 7>;

struct Piece {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Piece& o) const { return error < o.error; }
};

// One 15-point Kronrod / 7-point Gauss pair on [a, b]. Boost's adaptive
// driver (1.74) compares unscaled error estimates against scaled integrals,
// so only its rule tables are used here.
Piece kronrod_piece(const std::function<double(double)>& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const auto& x = Kronrod::abscissa();
  const auto& wk = Kronrod::weights();
  const auto& wg = Gauss::weights();
  const double f0 = f(mid);
  double k = f0 * wk[0];
  double g = f0 * wg[0];
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double fp = f(mid + half * x[i]);
    const double fm = f(mid - half * x[i]);
    k += (fp + fm) * wk[i];
    // Gauss nodes are the even-indexed Kronrod abscissae.
    if (i % 2 == 0) g += (fp + fm) * wg[i / 2];
  }
  const double err = std::max(std::abs(k - g), 50.0 * std::numeric_limits<double>::epsilon() * std::abs(k));
  return {a, b, k * half, err * half};
}

double adaptive(const std::function<double(double)>& f, double lo, double hi,
                const QuadratureSpec& spec, double* error_out) {
  std::priority_queue<Piece> heap;
  heap.push(kronrod_piece(f, lo, hi));
  double total = heap.top().value;
  double error = heap.top().error;
  int pieces = 1;
  auto target = [&] { return std::max(spec.abs_tol, spec.rel_tol * std::abs(total)); };
  while (error > target() && pieces < spec.max_subdivisions) {
    const Piece worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    // Cannot split further in floating point.
    if (!(mid > worst.a && mid < worst.b)) break;
    heap.pop();
    const Piece left = kronrod_piece(f, worst.a, mid);
    const Piece right = kronrod_piece(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++pieces;
  }
  // Re-sum to shed the drift of the running updates.
  total = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  *error_out = error;
  return total;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const QuadratureSpec& spec) {
  return integrate(f, lo, hi, spec, nullptr);
}

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const QuadratureSpec& spec, double* error_estimate) {
  detail::require(spec.abs_tol > 0.0 && spec.rel_tol > 0.0 && spec.max_subdivisions > 0,
                  "integrate: tolerances and subdivision limit must be positive");
  detail::require(!std::isnan(lo) && !std::isnan(hi), "integrate: NaN bound");
  if (lo == hi) {
    if (error_estimate) *error_estimate = 0.0;
    return 0.0;
  }
  if (lo > hi) return -integrate(f, hi, lo, spec, error_estimate);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  double error = 0.0;
  double value = 0.0;
  if (lo == -kInf && hi == kInf) {
    // x = t / (1 - t^2) on (-1, 1)
    auto g = [&](double t) {
      const double d = 1.0 - t * t;
      if (d <= 0.0) return 0.0;
      const double v = f(t / d) * (1.0 + t * t) / (d * d);
      return std::isfinite(v) ? v : 0.0;
    };
    value = adaptive(g, -1.0, 1.0, spec, &error);
  } else if (hi == kInf) {
    // x = lo + t / (1 - t) on [0, 1)
    auto g = [&](double t) {
      const double d = 1.0 - t;
      if (d <= 0.0) return 0.0;
      const double v = f(lo + t / d) / (d * d);
      return std::isfinite(v) ? v : 0.0;
    };
    value = adaptive(g, 0.0, 1.0, spec, &error);
  } else if (lo == -kInf) {
    auto g = [&](double t) {
      const double d = 1.0 - t;
      if (d <= 0.0) return 0.0;
      const double v = f(hi - t / d) / (d * d);
      return std::isfinite(v) ? v : 0.0;
    };
    value = adaptive(g, 0.0, 1.0, spec, &error);
  } else {
    value = adaptive(f, lo, hi, spec, &error);
  }
  if (error_estimate) *error_estimate = error;
  if (!std::isfinite(value)) throw NonConvergence("integrate: non-finite result");
  const double target = std::max(spec.abs_tol, spec.rel_tol * std::abs(value));
  if (error > target) {
    char msg[160];
    std::snprintf(msg, sizeof msg, "integrate: error estimate %.3g above tolerance %.3g (integral %.6g)",
                  error, target, value);
    throw NonConvergence(msg);
  }
  return value;
}

}  // namespace sharpfid::numerics
