#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sharpfid/core/summaries.hpp"
#include "sharpfid/core/types.hpp"
#include "sharpfid/models/normal_direct.hpp"

namespace sharpfid::normal_gibbs {

/// Order in which the two full conditionals are visited.
/// Fixed orders record the state after each complete sweep; the random scan
/// records it after every single update.
enum class ScanOrder { mu_then_sigma, sigma_then_mu, uniform_random };

std::string to_string(ScanOrder scan);
/// Accepts "fixed:mu-sigma", "fixed:sigma-mu", "random" (and the Greek-letter forms).
ScanOrder parse_scan_order(const std::string& text);

/// How mu is updated given sigma. `fiducial` ignores the hypothesis and draws
/// from N(xbar, sigma^2 / n); the chain then targets the joint fiducial density.
enum class MuUpdate { post_data, fiducial };

struct GibbsOptions {
  std::size_t n_samples = 500'000;
  std::size_t burn_in = 1000;
  ScanOrder scan = ScanOrder::mu_then_sigma;
  MuUpdate mu_update = MuUpdate::post_data;
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;
  /// Defaults to (xbar, s).
  std::optional<double> mu0;
  std::optional<double> sigma0;
};

struct ChainOutput {
  std::vector<double> mu;
  std::vector<double> sigma;
  std::size_t burn_in = 0;
  ScanOrder scan = ScanOrder::mu_then_sigma;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return mu.size(); }
  /// Fraction of recorded mu values in [lo, hi].
  double probability_mu_in(double lo, double hi) const;
};

/// sigma^2 | mu ~ Inv-Gamma(n/2, S(mu)/2), as a density in sigma^2.
DensityHandle conditional_sigma2(double mu, const NormalSummary& s);

/// Post-data density of mu at a fixed sigma (the known-variance analysis).
DensityHandle conditional_mu(double sigma, const NormalSummary& s, const IntervalHypothesis& hyp,
                             const GpdSpec& gpd);

ChainOutput gibbs_run(const NormalSummary& s, const IntervalHypothesis& hyp, const GpdSpec& gpd,
                      const GibbsOptions& options);

struct ScanDiagnostic {
  /// Pooled-over-replicates mean correlation of (mu, sigma) per fixed order.
  double corr_mu_sigma = 0.0;
  double corr_sigma_mu = 0.0;
  std::vector<double> replicates_mu_sigma;
  std::vector<double> replicates_sigma_mu;
  /// corr_sigma_mu - corr_mu_sigma
  double difference = 0.0;
  /// Two-sample z statistic on the Fisher-transformed replicate correlations.
  double z = 0.0;
  double p_value = 1.0;
};

/// Runs `replicates` independent chains per fixed order, each of n_samples
/// recorded states. Throws ValidationError for n_samples < 4 or replicates < 2.
ScanDiagnostic scan_order_diagnostic(const NormalSummary& s, const IntervalHypothesis& hyp,
                                     const GpdSpec& gpd, std::size_t n_samples,
                                     std::size_t replicates, std::uint64_t seed,
                                     std::size_t burn_in = 1000);

struct SliceDiscrepancy {
  double sigma_lo = 0.0;
  double sigma_hi = 0.0;
  std::size_t count = 0;
  /// KS distance between the chain's mu values in the slice and the
  /// conditional density of mu at the slice midpoint.
  double ks_distance = 0.0;
  double ks_p_value = 1.0;
};

/// `sigma_edges` are increasing slice boundaries. Throws
/// InsufficientSlicePopulation when a slice holds fewer than min_count states.
std::vector<SliceDiscrepancy> conditional_discrepancy(const ChainOutput& chain,
                                                      const NormalSummary& s,
                                                      const IntervalHypothesis& hyp,
                                                      const GpdSpec& gpd,
                                                      std::span<const double> sigma_edges,
                                                      std::size_t min_count = 500);

struct GelmanRubinReport {
  double r_hat_mu = 0.0;
  double r_hat_sigma = 0.0;
};

/// One chain per seed. Overdispersed starts spread mu over xbar +- 4 s/sqrt(n)
/// and sigma over s/2 .. 2s. Throws ValidationError for fewer than two chains
/// or repeated seeds, which would make the chains identical.
GelmanRubinReport gelman_rubin_study(const NormalSummary& s, const IntervalHypothesis& hyp,
                                     const GpdSpec& gpd, std::span<const std::uint64_t> seeds,
                                     bool overdispersed_starts, const GibbsOptions& base);

/// Post-data probability of the hypothesis on mu with sigma unknown, at either
/// smoothing level. The conditional level runs a Gibbs chain with `options`.
double post_prob_unknown_sigma(const NormalSummary& s, const IntervalHypothesis& hyp,
                               const GpdSpec& gpd, normal_direct::SmoothingLevel level,
                               const GibbsOptions& options);

}  // namespace sharpfid::normal_gibbs
