#pragma once

#include <stdexcept>
#include <string>

namespace sharpfid {

/// Broad failure class, used by the CLI to pick an exit code.
enum class ErrorKind {
  validation,  // bad input; exit 2
  numerical,   // a well-posed computation could not be completed; exit 3
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

/// Both predictive evidences vanish while the prior is not degenerate.
class IndeterminateEvidence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Mixture components overlap on a set of positive length.
class SupportOverlap : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A weighted density or sample has zero total mass after weighting.
class ZeroMass : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A truncation region carries (numerically) zero probability.
class ZeroRegionMass : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class BadBracket : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// No smoothing constant in [0, tau_max] makes the post-data density continuous.
class NoRoot : public NumericalError {
 public:
  NoRoot(const std::string& what, double g_at_zero, double g_at_max)
      : NumericalError(what), g_at_zero_(g_at_zero), g_at_max_(g_at_max) {}
  double g_at_zero() const noexcept { return g_at_zero_; }
  double g_at_max() const noexcept { return g_at_max_; }

 private:
  double g_at_zero_;
  double g_at_max_;
};

class EmptySample : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InsufficientSlicePopulation : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

}  // namespace detail
}  // namespace sharpfid
