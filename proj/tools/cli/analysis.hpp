#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cli/output.hpp"
#include "sharpfid/core/types.hpp"

namespace sharpfid::cli {

/// Everything needed to run one backend, filled from flags or a JSON spec.
struct AnalysisSpec {
  std::string model;

  // Data summaries; which ones are needed depends on the model.
  std::optional<int> n;
  std::optional<int> x;
  std::optional<double> xbar;
  std::optional<double> sd;
  std::optional<double> se;
  std::optional<int> e_t, n_t, e_c, n_c;

  // Hypothesis: either eps around center, or explicit lo / hi.
  std::optional<double> eps;
  std::optional<double> center;
  std::optional<double> lo;
  std::optional<double> hi;
  std::optional<double> prior;

  /// "flat" or "smoothed"; unset means flat, except relative-risk.
  std::optional<std::string> gpd;
  double bump_alpha = 4.0;
  double bump_beta = 4.0;
  std::optional<double> tau;

  std::optional<std::size_t> samples;
  std::size_t burn_in = 1000;
  std::optional<std::uint64_t> seed;
  std::string scan = "random";
  int threads = 0;
  bool jeffreys = false;

  std::optional<std::filesystem::path> out;
  std::string format = "csv";
};

inline const std::vector<std::string>& model_names() {
  static const std::vector<std::string> names{"normal-known", "normal-gibbs", "normal-direct",
                                              "binomial", "relative-risk"};
  return names;
}

/// Parses a schema-1 JSON spec. Throws ValidationError on malformed input.
AnalysisSpec parse_spec_json(const std::string& text);

/// Explicit seed, else SHARPFID_SEED, else 1.
std::uint64_t resolve_seed(std::optional<std::uint64_t> explicit_seed);

struct AnalysisOutput {
  nlohmann::ordered_json record;
  /// (file stem, table)
  std::vector<std::pair<std::string, CsvTable>> tables;
};

AnalysisOutput run_analysis(const AnalysisSpec& spec);

/// Prints the record to `out`, or writes result + tables under spec.out.
void emit(const AnalysisSpec& spec, const AnalysisOutput& output, std::ostream& out);

// Table helpers shared with the figure commands.

/// Rows (x, density, curve) for the continuous part of a density on a grid.
void add_curve(CsvTable& table, const DensityHandle& density, const std::vector<double>& grid,
               const std::string& label);

/// Rows (bin_lo, bin_hi, density, curve), densities multiplied by `scale`.
void add_histogram(CsvTable& table, const Histogram& histogram, double scale,
                   const std::string& label);

/// Histogram rows of p_in * inside + p_out * outside, with the outside
/// component's empty gap over the interval left out.
void add_mixture_histogram(CsvTable& table, const PostDataResult& result,
                           const std::string& label);

CsvTable curve_table();
CsvTable histogram_table();

/// Even grid with n points on [lo, hi].
std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace sharpfid::cli
