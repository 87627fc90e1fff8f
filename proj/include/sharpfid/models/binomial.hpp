#pragma once

#include "sharpfid/core/summaries.hpp"
#include "sharpfid/core/types.hpp"

namespace sharpfid::binomial {

/// Data generating step: the smallest y with F(y; pi, n) > gamma.
int phi_binomial(double gamma, double pi, int n);

/// The pi values that the primary draw gamma maps onto the observed count,
/// i.e. {pi : F(x-1; pi) <= gamma < F(x; pi)}, returned as (lo, hi).
struct PreimageInterval {
  double gamma = 0.0;
  double lo = 0.0;
  double hi = 1.0;
};

PreimageInterval preimage_interval(double gamma, int x, int n);

/// One draw from f_S(pi | x): gamma uniform, then Beta(x+1, n-x+1) restricted
/// to the preimage of gamma. For x > n/2 the draw is 1 - (a draw for n - x),
/// so mirrored counts consume identical random streams.
double sample_fS_one(const BinomialCount& count, numerics::RngStream& rng);

/// N draws with unit weights. Chunked over independent streams of options.seed.
WeightedSample<double> sample_fS(const BinomialCount& count, const McOptions& options);

/// Fills `out` with draws from stream `stream_id`. When lo_out / hi_out are
/// non-empty they receive the preimage interval behind each draw.
void sample_fS_into(const BinomialCount& count, std::span<double> out, std::uint64_t seed,
                    std::uint64_t stream_id, std::span<double> lo_out = {},
                    std::span<double> hi_out = {});

/// sample_fS_into over options.chunks streams numbered from stream_base.
void sample_fS_chunked(const BinomialCount& count, const McOptions& options,
                       std::uint64_t stream_base, std::span<double> out,
                       std::span<double> lo_out = {}, std::span<double> hi_out = {});

/// Importance-sampled post-data result. Components are weighted histograms;
/// mc_stderr is the delta-method standard error of p_in.
PostDataResult analyze(const BinomialCount& count, const IntervalHypothesis& hyp,
                       const GpdSpec& gpd, const McOptions& options);

}  // namespace sharpfid::binomial
