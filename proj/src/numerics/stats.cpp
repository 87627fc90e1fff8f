#include "sharpfid/numerics/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sharpfid/error.hpp"

namespace sharpfid::numerics {

namespace {

void require_same_length(std::span<const double> a, std::span<const double> b, const char* what) {
  detail::require(a.size() == b.size(), std::string(what) + ": length mismatch");
  if (a.empty()) throw EmptySample(std::string(what) + ": empty sample");
}

}  // namespace

double ess(std::span<const double> weights) {
  if (weights.empty()) throw EmptySample("ess: empty sample");
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double w : weights) {
    sum += w;
    sum_sq += w * w;
  }
  if (!(sum_sq > 0.0)) throw ZeroMass("ess: all weights are zero");
  return sum * sum / sum_sq;
}

double weighted_mean(std::span<const double> values, std::span<const double> weights) {
  require_same_length(values, weights, "weighted_mean");
  double sw = 0.0;
  double swx = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sw += weights[i];
    swx += weights[i] * values[i];
  }
  if (!(sw > 0.0)) throw ZeroMass("weighted_mean: zero total weight");
  return swx / sw;
}

double weighted_quantile(std::span<const double> values, std::span<const double> weights,
                         double q) {
  require_same_length(values, weights, "weighted_quantile");
  detail::require(q >= 0.0 && q <= 1.0, "weighted_quantile: q outside [0, 1]");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw ZeroMass("weighted_quantile: zero total weight");
  double cum = 0.0;
  for (std::size_t i : order) {
    cum += weights[i];
    if (cum >= q * total) return values[i];
  }
  return values[order.back()];
}

std::size_t freedman_diaconis_bins(std::span<const double> values, std::span<const double> weights,
                                   double lo, double hi) {
  require_same_length(values, weights, "freedman_diaconis_bins");
  if (!(hi > lo)) return 1;
  const double iqr = weighted_quantile(values, weights, 0.75) - weighted_quantile(values, weights, 0.25);
  const double n_eff = ess(weights);
  std::size_t bins;
  if (iqr > 0.0) {
    const double width = 2.0 * iqr / std::cbrt(n_eff);
    bins = static_cast<std::size_t>(std::ceil((hi - lo) / width));
  } else {
    bins = static_cast<std::size_t>(std::ceil(std::sqrt(n_eff)));
  }
  return std::clamp<std::size_t>(bins, 1, 10'000);
}

DensityHandle weighted_histogram_edges(std::span<const double> values,
                                       std::span<const double> weights, std::vector<double> edges) {
  require_same_length(values, weights, "weighted_histogram");
  detail::require(edges.size() >= 2, "weighted_histogram: need at least one bin");
  const std::size_t bins = edges.size() - 1;
  Histogram h;
  h.densities.assign(bins, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (v < edges.front() || v > edges.back()) continue;
    auto it = std::upper_bound(edges.begin(), edges.end(), v);
    std::size_t k = static_cast<std::size_t>(it - edges.begin());
    k = std::min(k == 0 ? 0 : k - 1, bins - 1);
    h.densities[k] += weights[i];
    total += weights[i];
  }
  if (!(total > 0.0)) throw ZeroMass("weighted_histogram: no weight inside the range");
  h.edges = std::move(edges);
  for (std::size_t k = 0; k < bins; ++k) h.densities[k] /= total * h.width(k);
  return DensityHandle::histogram(std::move(h));
}

DensityHandle weighted_histogram(std::span<const double> values, std::span<const double> weights,
                                 const HistogramOptions& options) {
  require_same_length(values, weights, "weighted_histogram");
  const auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
  const double lo = options.lo.value_or(*min_it);
  double hi = options.hi.value_or(*max_it);
  detail::require(hi >= lo, "weighted_histogram: empty range");
  if (hi == lo) hi = lo + std::max(1e-12, std::abs(lo) * 1e-12);
  const std::size_t bins = options.bins.value_or(freedman_diaconis_bins(values, weights, lo, hi));
  detail::require(bins >= 1, "weighted_histogram: need at least one bin");
  std::vector<double> edges(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) edges[i] = lo + (hi - lo) * static_cast<double>(i) / bins;
  edges.back() = hi;
  return weighted_histogram_edges(values, weights, std::move(edges));
}

DensityHandle outside_histogram(std::span<const double> values, std::span<const double> weights,
                                double lo, double hi, double range_lo, double range_hi) {
  require_same_length(values, weights, "outside_histogram");
  detail::require(range_lo <= lo && lo <= hi && hi <= range_hi, "outside_histogram: bad ranges");
  const std::size_t fd = freedman_diaconis_bins(values, weights, range_lo, range_hi);
  const double width = (range_hi - range_lo) / static_cast<double>(fd);
  std::vector<double> edges;
  auto add_side = [&](double a, double b) {
    if (!(b > a)) return;
    const auto k = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((b - a) / width)));
    for (std::size_t i = 0; i <= k; ++i) {
      const double e = i == k ? b : a + (b - a) * static_cast<double>(i) / k;
      if (edges.empty() || e > edges.back()) edges.push_back(e);
    }
  };
  add_side(range_lo, lo);
  if (!edges.empty() && hi > edges.back()) edges.push_back(hi);  // the empty gap bin
  add_side(hi, range_hi);
  if (edges.size() < 2) edges = {range_lo, range_hi};
  return weighted_histogram_edges(values, weights, std::move(edges));
}

double gelman_rubin(const std::vector<std::vector<double>>& chains) {
  detail::require(chains.size() >= 2, "gelman_rubin: need at least two chains");
  const std::size_t n = chains.front().size();
  for (const auto& c : chains) {
    detail::require(c.size() == n, "gelman_rubin: chains differ in length");
  }
  if (n < 4) throw EmptySample("gelman_rubin: chains shorter than 4");
  const std::size_t half = n / 2;
  std::vector<double> means;
  std::vector<double> vars;
  for (const auto& c : chains) {
    // Second half starts at n - half so an odd middle point is dropped.
    for (std::size_t start : {std::size_t{0}, n - half}) {
      std::span<const double> part(c.data() + start, half);
      means.push_back(mean(part));
      vars.push_back(variance(part));
    }
  }
  const double m = static_cast<double>(means.size());
  const double len = static_cast<double>(half);
  const double grand = mean(means);
  double b = 0.0;
  for (double mu : means) b += (mu - grand) * (mu - grand);
  b *= len / (m - 1.0);
  const double w = mean(vars);
  if (!(w > 0.0)) throw ZeroMass("gelman_rubin: zero within-chain variance");
  const double var_plus = (len - 1.0) / len * w + b / len;
  return std::sqrt(var_plus / w);
}

double kolmogorov_p_value(double d, double effective_n) {
  const double rn = std::sqrt(effective_n);
  const double lambda = (rn + 0.12 + 0.11 / rn) * d;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-16 * std::abs(sum)) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw EmptySample("ks_one_sample: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return {d, kolmogorov_p_value(d, n)};
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw EmptySample("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return {d, kolmogorov_p_value(d, na * nb / (na + nb))};
}

double mean(std::span<const double> x) {
  if (x.empty()) throw EmptySample("mean: empty sample");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.size() < 2) throw EmptySample("variance: need at least two values");
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return ss / static_cast<double>(x.size() - 1);
}

double pearson(std::span<const double> x, std::span<const double> y) {
  require_same_length(x, y, "pearson");
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (!(sxx > 0.0 && syy > 0.0)) throw ZeroMass("pearson: constant input");
  return sxy / std::sqrt(sxx * syy);
}

double fisher_z(double r) {
  detail::require(r > -1.0 && r < 1.0, "fisher_z: |r| must be below 1");
  return std::atanh(r);
}

}  // namespace sharpfid::numerics
