#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "sharpfid/core/density.hpp"

namespace sharpfid::numerics {

/// (sum w)^2 / sum w^2. Throws EmptySample on an empty span.
double ess(std::span<const double> weights);

double weighted_mean(std::span<const double> values, std::span<const double> weights);

/// Weighted quantile by linear scan of the sorted sample (q in [0, 1]).
double weighted_quantile(std::span<const double> values, std::span<const double> weights,
                         double q);

/// Freedman-Diaconis bin count for a weighted sample on [lo, hi], using the
/// weighted IQR and the effective sample size. At least 1.
std::size_t freedman_diaconis_bins(std::span<const double> values, std::span<const double> weights,
                                   double lo, double hi);

struct HistogramOptions {
  std::optional<std::size_t> bins;
  std::optional<double> lo;
  std::optional<double> hi;
};

/// Normalized histogram of a weighted sample. The range defaults to the sample
/// range and the bin count to Freedman-Diaconis.
DensityHandle weighted_histogram(std::span<const double> values, std::span<const double> weights,
                                 const HistogramOptions& options = {});

/// Histogram on caller-supplied increasing edges; values outside are ignored.
DensityHandle weighted_histogram_edges(std::span<const double> values,
                                       std::span<const double> weights, std::vector<double> edges);

/// Histogram of a sample that lives outside (lo, hi) within [range_lo, range_hi]:
/// Freedman-Diaconis bins on each side and one empty bin spanning (lo, hi).
DensityHandle outside_histogram(std::span<const double> values, std::span<const double> weights,
                                double lo, double hi, double range_lo, double range_hi);

/// Split-chain potential scale reduction factor. Needs at least two chains of
/// equal length >= 4. Each chain is split in half before pooling.
double gelman_rubin(const std::vector<std::vector<double>>& chains);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Asymptotic Kolmogorov tail probability with the small-sample correction
/// sqrt(n) + 0.12 + 0.11 / sqrt(n).
double kolmogorov_p_value(double d, double effective_n);

KsResult ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf);
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

double mean(std::span<const double> x);
double variance(std::span<const double> x);
double pearson(std::span<const double> x, std::span<const double> y);
double fisher_z(double r);

}  // namespace sharpfid::numerics
