#pragma once

// Benchmark configuration in a flat sectioned key = value format:
//
//   [shapes]  kinds = cylinder, box     n_scenes = 100    sample_count = 1024
//   [fit]     mode = supervised|blind   seed = <master seed>
//             symmetry = true|rotational|mirror|asymmetric
//             plus every FitConfig field by name
//   [noise]   sigma = 0.0 (meters)      crop = 0.0 (fraction in [0, 0.5])
//   [output]  csv = path                summary = path    threads = 1
//
// '#' and ';' start comments. Unknown sections or keys, duplicate keys and
// malformed values raise ConfigError with the line number and key.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "s3pose/pose_fitter.hpp"
#include "s3pose/shapes.hpp"

namespace s3pose {

struct BenchConfig {
  std::vector<ShapeKind> shapes{ShapeKind::cylinder, ShapeKind::box,
                                ShapeKind::l_bracket};
  int n_scenes = 10;
  int sample_count = 1024;
  FitMode mode = FitMode::supervised;
  FitConfig fit;
  std::uint64_t seed = 0;
  /// Symmetry kind handed to the fitter; empty means the shape's true kind.
  std::optional<SymmetryKind> fit_symmetry;
  double noise_sigma = 0.0;
  double crop = 0.0;
  std::string csv_path;
  std::string summary_path;
  int threads = 1;
};

BenchConfig parse_bench_config(std::istream& in);
/// Throws IoError when the file cannot be read.
BenchConfig load_bench_config(const std::filesystem::path& path);

}  // namespace s3pose
