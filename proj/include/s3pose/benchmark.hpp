#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "s3pose/bench_config.hpp"
#include "s3pose/metrics.hpp"
#include "s3pose/scene.hpp"

namespace s3pose {

struct SceneResult {
  int scene_id = 0;
  ShapeKind shape = ShapeKind::cylinder;
  SymmetryKind sym_kind = SymmetryKind::asymmetric;  // true symmetry
  /// NaN when the fit failed.
  double rot_err_deg = 0.0;
  double trans_err_cm = 0.0;
  double fit_objective = 0.0;
  std::uint64_t seed = 0;
  std::string error;  // empty on success
};

struct BenchResult {
  std::vector<SceneResult> scenes;  // ordered by scene_id
  MetricsReport overall;
  std::map<ShapeKind, MetricsReport> per_shape;
};

/// Builds scene `scene_id` of `shape`; the seed is derived from the master seed
/// and the global scene id.
Scene bench_scene(const BenchConfig& cfg, ShapeKind shape, int scene_id);

/// Fits one scene and scores it against the true symmetry.
SceneResult run_scene(const BenchConfig& cfg, ShapeKind shape, int scene_id);

/// All shapes x n_scenes scenes on cfg.threads workers. Per-scene errors are
/// recorded as misses.
BenchResult run_benchmark(const BenchConfig& cfg);

void write_csv(std::ostream& out, const std::vector<SceneResult>& scenes);
void write_summary(std::ostream& out, const BenchResult& result);

}  // namespace s3pose
