#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>

namespace sharpfid {

/// Normal sample with known standard deviation.
struct NormalKnownSummary {
  int n = 1;
  double xbar = 0.0;
  double sigma = 1.0;

  NormalKnownSummary() = default;
  NormalKnownSummary(int n, double xbar, double sigma);
  /// n = 1 with sigma equal to the standard error.
  static NormalKnownSummary from_se(double xbar, double se) { return {1, xbar, se}; }

  double se() const noexcept { return sigma / std::sqrt(static_cast<double>(n)); }
};

/// Normal sample, mean and standard deviation unknown. s uses divisor n - 1.
struct NormalSummary {
  int n = 2;
  double xbar = 0.0;
  double s = 1.0;

  NormalSummary() = default;
  NormalSummary(int n, double xbar, double s);

  /// (n - 1) s^2 + n (xbar - mu)^2, the residual sum of squares about mu.
  double sum_sq(double mu) const noexcept {
    const double d = xbar - mu;
    return (n - 1) * s * s + n * d * d;
  }
};

struct BinomialCount {
  int x = 0;
  int n = 1;

  BinomialCount() = default;
  BinomialCount(int x, int n);
};

struct TwoArmCounts {
  int e_t = 0;
  int n_t = 1;
  int e_c = 0;
  int n_c = 1;

  TwoArmCounts() = default;
  TwoArmCounts(int e_t, int n_t, int e_c, int n_c);

  BinomialCount treatment() const { return {e_t, n_t}; }
  BinomialCount control() const { return {e_c, n_c}; }
  TwoArmCounts swapped() const { return {e_c, n_c, e_t, n_t}; }
};

/// Monte Carlo controls shared by the sampling backends. Work is split into a
/// fixed number of chunks, each on its own stream, so results do not depend
/// on the number of threads.
struct McOptions {
  std::size_t samples = 2'000'000;
  std::uint64_t seed = 1;
  int chunks = 16;
  /// 0 means std::thread::hardware_concurrency().
  int threads = 0;
};

}  // namespace sharpfid
