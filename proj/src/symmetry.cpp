#include "s3pose/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "s3pose/errors.hpp"
#include "s3pose/nearest_neighbor.hpp"

namespace s3pose {

namespace {

constexpr std::size_t kMaxMirrorClosure = 64;
constexpr double kSameRotation = 1e-9;
constexpr double kInconsistencyFloor = 1e-8;
// Axis weights fall off as inconsistency^-4. With plain inverse weights the
// two-sample Chamfer floor of a surface sampling keeps the true axis of a
// 1024-point cylinder below pi = 0.7.
constexpr double kAxisSharpness = 4.0;

Eigen::Vector3d canonical_axis(int k) {
  return Eigen::Vector3d::Unit(k);
}

}  // namespace

std::string_view to_string(SymmetryKind kind) {
  switch (kind) {
    case SymmetryKind::rotational: return "rotational";
    case SymmetryKind::mirror: return "mirror";
    case SymmetryKind::asymmetric: return "asymmetric";
  }
  return "asymmetric";
}

SymmetryKind parse_symmetry_kind(std::string_view name) {
  if (name == "rotational") return SymmetryKind::rotational;
  if (name == "mirror") return SymmetryKind::mirror;
  if (name == "asymmetric") return SymmetryKind::asymmetric;
  throw ConfigError("unknown symmetry kind '" + std::string(name) + "'", 0,
                    "sym");
}

SymmetrySpec SymmetrySpec::rotational(const Eigen::Vector3d& distribution) {
  SymmetrySpec spec;
  spec.kind = SymmetryKind::rotational;
  spec.axis_distribution = distribution;
  return spec;
}

SymmetrySpec SymmetrySpec::mirror(std::vector<Eigen::Vector3d> normals) {
  SymmetrySpec spec;
  spec.kind = SymmetryKind::mirror;
  spec.plane_normals = std::move(normals);
  return spec;
}

Eigen::Vector3d SymmetrySpec::axis() const { return synth_axis(axis_distribution); }

Eigen::Vector3d synth_axis(const Eigen::Vector3d& distribution) {
  // pi_x e_x + pi_y e_y + pi_z e_z is the distribution vector itself.
  const double n = distribution.norm();
  if (!(n >= 1e-9)) {
    throw DegenerateAxis("axis distribution combines to a zero vector");
  }
  return distribution / n;
}

PlaneTriple orthonormal_triple(const Eigen::Vector3d& n,
                               const Eigen::Vector3d& n_raw) {
  const Eigen::Vector3d secondary = n_raw - n_raw.dot(n) * n;
  const double raw_norm = n_raw.norm();
  if (!(raw_norm > 0.0) || secondary.norm() <= std::sin(1e-4) * raw_norm) {
    throw ParallelInput("secondary plane direction is parallel to the normal");
  }
  PlaneTriple t;
  t.n = n;
  t.n_prime = secondary.normalized();
  t.n_double_prime = n.cross(t.n_prime);
  return t;
}

EquivalentSet equivalent_set_rotational(const UnitQuaternion& q_gt,
                                        const Eigen::Vector3d& axis, int n_eq) {
  EquivalentSet set;
  set.ground_truth = q_gt;
  set.kind = SymmetryKind::rotational;
  const int count = std::max(n_eq, 1);
  const Eigen::Vector3d unit_axis = axis.normalized();
  set.quaternions.reserve(std::size_t(count));
  set.quaternions.push_back(q_gt);
  for (int i = 1; i < count; ++i) {
    const double theta = 2.0 * std::numbers::pi * double(i) / double(count);
    set.quaternions.push_back(
        compose(q_gt, exp_map(TangentVector(theta * unit_axis))));
  }
  return set;
}

EquivalentSet equivalent_set_mirror(const UnitQuaternion& q_gt,
                                    std::span<const Eigen::Vector3d> planes) {
  EquivalentSet set;
  set.ground_truth = q_gt;
  set.kind = SymmetryKind::mirror;
  set.quaternions.push_back(q_gt);

  std::vector<UnitQuaternion> generators;
  for (const auto& u : planes) {
    generators.push_back(exp_map(TangentVector(std::numbers::pi * u.normalized())));
  }
  const auto contains = [&](const UnitQuaternion& q) {
    return std::any_of(set.quaternions.begin(), set.quaternions.end(),
                       [&](const UnitQuaternion& e) {
                         return angular_distance(e, q) < kSameRotation;
                       });
  };
  // Breadth-first closure under right multiplication by the generators.
  for (std::size_t head = 0;
       head < set.quaternions.size() && set.quaternions.size() < kMaxMirrorClosure;
       ++head) {
    for (const auto& g : generators) {
      const UnitQuaternion next = compose(set.quaternions[head], g);
      if (!contains(next)) set.quaternions.push_back(next);
      if (set.quaternions.size() >= kMaxMirrorClosure) break;
    }
  }
  return set;
}

PointCloud reflect_cloud(std::span<const Eigen::Vector3d> cloud,
                         const Eigen::Vector3d& u) {
  const Eigen::Vector3d pc = centroid(cloud);
  PointCloud out;
  out.reserve(cloud.size());
  for (const auto& p : cloud) {
    const double alpha = (p - pc).dot(u);
    out.push_back(p - 2.0 * alpha * u);
  }
  return out;
}

double mirror_consistency(std::span<const Eigen::Vector3d> cloud,
                          const Eigen::Vector3d& u) {
  return chamfer_bidirectional(cloud, reflect_cloud(cloud, u));
}

std::array<double, 3> plane_scores_from_consistency(
    const std::array<double, 3>& consistency, double epsilon) {
  std::array<double, 3> inv{};
  double total = 0.0;
  for (int j = 0; j < 3; ++j) {
    inv[j] = 1.0 / (consistency[j] + epsilon);
    total += inv[j];
  }
  std::array<double, 3> scores{};
  for (int j = 0; j < 3; ++j) scores[j] = inv[j] / (total + epsilon);
  return scores;
}

std::array<double, 3> plane_scores(std::span<const Eigen::Vector3d> cloud,
                                   const std::array<Eigen::Vector3d, 3>& planes,
                                   double epsilon) {
  std::array<double, 3> consistency{};
  for (int j = 0; j < 3; ++j) consistency[j] = mirror_consistency(cloud, planes[j]);
  return plane_scores_from_consistency(consistency, epsilon);
}

RotationalAxisEstimate estimate_rotational_axis(
    std::span<const Eigen::Vector3d> cloud, int n_probe_angles) {
  const int probes = std::max(n_probe_angles, 1);
  const Eigen::Vector3d pc = centroid(cloud);
  PointCloud centered;
  centered.reserve(cloud.size());
  for (const auto& p : cloud) centered.push_back(p - pc);
  const NearestNeighborIndex index(centered);

  RotationalAxisEstimate est;
  PointCloud rotated(centered.size());
  for (int k = 0; k < 3; ++k) {
    double total = 0.0;
    for (int j = 1; j <= probes; ++j) {
      // Angles strictly inside (0, 2 pi), skipping pi for even counts + 1.
      const double theta = 2.0 * std::numbers::pi * double(j) / double(probes + 1);
      const UnitQuaternion r = exp_map(TangentVector(theta * canonical_axis(k)));
      const UnitQuaternion r_inv = inverse(r);
      // d(P, RP) equals d(R^-1 P, P), so a single index over P serves both
      // directions.
      for (std::size_t i = 0; i < centered.size(); ++i) {
        rotated[i] = r.rotate(centered[i]);
      }
      const double forward = chamfer_one_sided(rotated, index);
      for (std::size_t i = 0; i < centered.size(); ++i) {
        rotated[i] = r_inv.rotate(centered[i]);
      }
      const double backward = chamfer_one_sided(rotated, index);
      total += 0.5 * (forward + backward);
    }
    est.inconsistency[k] = total / double(probes);
  }

  Eigen::Vector3d weights;
  for (int k = 0; k < 3; ++k) {
    weights[k] = std::pow(est.inconsistency[k] + kInconsistencyFloor, -kAxisSharpness);
  }
  est.distribution = weights / weights.sum();
  est.axis = synth_axis(est.distribution);
  return est;
}

MirrorPlaneEstimate evaluate_mirror_planes(std::span<const Eigen::Vector3d> cloud,
                                           double keep_threshold,
                                           int n_probe_angles) {
  const RotationalAxisEstimate rot = estimate_rotational_axis(cloud, n_probe_angles);
  // Principal normal: the most likely canonical axis; secondary: the runner-up.
  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return rot.distribution[a] > rot.distribution[b];
  });
  const PlaneTriple triple =
      orthonormal_triple(canonical_axis(order[0]), canonical_axis(order[1]));

  MirrorPlaneEstimate est;
  est.candidates = triple.as_array();
  for (int j = 0; j < 3; ++j) {
    est.consistency[j] = mirror_consistency(cloud, est.candidates[j]);
  }
  est.scores = plane_scores_from_consistency(est.consistency);

  std::vector<Eigen::Vector3d> kept;
  for (int j = 0; j < 3; ++j) {
    if (est.scores[j] >= keep_threshold) kept.push_back(est.candidates[j]);
  }
  est.spec = SymmetrySpec::mirror(std::move(kept));
  est.spec.axis_distribution = rot.distribution;
  return est;
}

MirrorPlaneEstimate estimate_mirror_planes(std::span<const Eigen::Vector3d> cloud,
                                           double keep_threshold,
                                           int n_probe_angles) {
  MirrorPlaneEstimate est = evaluate_mirror_planes(cloud, keep_threshold, n_probe_angles);
  if (est.spec.plane_normals.empty()) {
    throw NoPlaneRetained("no candidate mirror plane reached the keep threshold");
  }
  return est;
}

}  // namespace s3pose
