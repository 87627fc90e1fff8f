#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace sharpfid::cli {

struct FigureOptions {
  std::filesystem::path out_dir = ".";
  std::uint64_t seed = 1;
  /// Full sample sizes for the Monte Carlo figures (4, 6 and 9).
  bool paper_scale = false;
  int threads = 0;
};

/// Writes the CSV data behind figure `id` (1..9) plus a figN_meta.json
/// describing grids and settings. Returns the written paths.
std::vector<std::filesystem::path> write_figure(int id, const FigureOptions& options);

/// The xbar grid of the probability-curve figures: 0 to 5 in steps of 0.025.
std::vector<double> xbar_grid();

}  // namespace sharpfid::cli
