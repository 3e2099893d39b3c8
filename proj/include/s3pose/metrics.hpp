#pragma once

#include <array>
#include <span>
#include <vector>

#include "s3pose/quaternion.hpp"
#include "s3pose/symmetry.hpp"

namespace s3pose {

/// Equivalent samples used for evaluation, dense enough for sub-degree error.
inline constexpr int kEvalNeq = 360;

/// Hard minimum of the angular distance from q_pred to the ground truth's
/// equivalent set, in degrees. An asymmetric spec gives the plain distance.
double rot_error_mod_sym(const UnitQuaternion& q_pred, const UnitQuaternion& q_gt,
                         const SymmetrySpec& sym, int n_eq = kEvalNeq);

/// |t_pred - t_gt| in centimeters.
double trans_error(const Eigen::Vector3d& t_pred, const Eigen::Vector3d& t_gt);

struct SceneError {
  double rot_err_deg = 0.0;
  double trans_err_cm = 0.0;
};

struct Threshold {
  double degrees;
  double centimeters;
};

inline constexpr std::array<Threshold, 4> kApThresholds{
    {{10.0, 10.0}, {5.0, 5.0}, {5.0, 2.0}, {10.0, 5.0}}};

/// Percentage of results inside each (degrees, cm) box. NaN errors count as
/// misses. Throws std::invalid_argument on an empty result list.
std::vector<double> ap_at_thresholds(std::span<const SceneError> results,
                                     std::span<const Threshold> thresholds);

struct MetricsReport {
  std::vector<SceneError> per_scene;
  /// Means and medians over the finite entries; NaN when there are none.
  double mean_rot_deg = 0.0;
  double mean_trans_cm = 0.0;
  double median_rot_deg = 0.0;
  double median_trans_cm = 0.0;
  int failures = 0;
  /// Aligned with kApThresholds; empty for an empty report.
  std::vector<double> ap;
};

MetricsReport summarize(std::vector<SceneError> per_scene);

}  // namespace s3pose
