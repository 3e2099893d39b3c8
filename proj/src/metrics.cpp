#include "s3pose/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace s3pose {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return kNaN;
  double s = 0.0;
  for (double x : v) s += x;
  return s / double(v.size());
}

double median_of(std::vector<double> v) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

double rot_error_mod_sym(const UnitQuaternion& q_pred, const UnitQuaternion& q_gt,
                         const SymmetrySpec& sym, int n_eq) {
  double best = angular_distance(q_pred, q_gt);
  if (sym.kind == SymmetryKind::rotational) {
    for (const auto& q : equivalent_set_rotational(q_gt, sym.axis(), n_eq).quaternions) {
      best = std::min(best, angular_distance(q_pred, q));
    }
  } else if (sym.kind == SymmetryKind::mirror && !sym.plane_normals.empty()) {
    for (const auto& q : equivalent_set_mirror(q_gt, sym.plane_normals).quaternions) {
      best = std::min(best, angular_distance(q_pred, q));
    }
  }
  return best * 180.0 / std::numbers::pi;
}

double trans_error(const Eigen::Vector3d& t_pred, const Eigen::Vector3d& t_gt) {
  return (t_pred - t_gt).norm() * 100.0;
}

std::vector<double> ap_at_thresholds(std::span<const SceneError> results,
                                     std::span<const Threshold> thresholds) {
  if (results.empty()) throw std::invalid_argument("AP of an empty result list");
  std::vector<double> out;
  out.reserve(thresholds.size());
  for (const auto& th : thresholds) {
    std::size_t hits = 0;
    for (const auto& r : results) {
      if (r.rot_err_deg <= th.degrees && r.trans_err_cm <= th.centimeters) ++hits;
    }
    out.push_back(100.0 * double(hits) / double(results.size()));
  }
  return out;
}

MetricsReport summarize(std::vector<SceneError> per_scene) {
  MetricsReport report;
  std::vector<double> rot;
  std::vector<double> trans;
  for (const auto& e : per_scene) {
    if (std::isfinite(e.rot_err_deg) && std::isfinite(e.trans_err_cm)) {
      rot.push_back(e.rot_err_deg);
      trans.push_back(e.trans_err_cm);
    } else {
      ++report.failures;
    }
  }
  report.mean_rot_deg = mean_of(rot);
  report.mean_trans_cm = mean_of(trans);
  report.median_rot_deg = median_of(rot);
  report.median_trans_cm = median_of(trans);
  if (!per_scene.empty()) report.ap = ap_at_thresholds(per_scene, kApThresholds);
  report.per_scene = std::move(per_scene);
  return report;
}

}  // namespace s3pose
