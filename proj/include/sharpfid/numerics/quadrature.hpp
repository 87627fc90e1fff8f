#pragma once

#include <functional>

namespace sharpfid::numerics {

struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_subdivisions = 1 << 14;
};

/// Adaptive Gauss-Kronrod (15-point) integration of f over [lo, hi]. Either
/// bound may be infinite. Throws NonConvergence when the error estimate is
/// still above max(abs_tol, rel_tol * |integral|) after max_subdivisions.
/// Integrands must be bounded near finite endpoints.
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const QuadratureSpec& spec = {});

/// Same, also returning the achieved error estimate.
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const QuadratureSpec& spec, double* error_estimate);

}  // namespace sharpfid::numerics
