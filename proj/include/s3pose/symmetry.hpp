#pragma once

// Symmetry representation, equivalent-solution sets, reflection geometry,
// Chamfer-based mirror consistency and annotation-free symmetry estimation.

#include <Eigen/Core>
#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "s3pose/point_cloud.hpp"
#include "s3pose/quaternion.hpp"

namespace s3pose {

enum class SymmetryKind { rotational, mirror, asymmetric };

std::string_view to_string(SymmetryKind kind);
/// Throws ConfigError for an unknown name.
SymmetryKind parse_symmetry_kind(std::string_view name);

struct SymmetrySpec {
  SymmetryKind kind = SymmetryKind::asymmetric;
  /// (pi_x, pi_y, pi_z); sums to one.
  Eigen::Vector3d axis_distribution = Eigen::Vector3d::Constant(1.0 / 3.0);
  /// Mirror-plane normals in the part frame; Omega = plane_normals.size().
  std::vector<Eigen::Vector3d> plane_normals;

  static SymmetrySpec rotational(const Eigen::Vector3d& distribution);
  static SymmetrySpec mirror(std::vector<Eigen::Vector3d> normals);
  static SymmetrySpec asymmetric() { return {}; }

  /// synth_axis(axis_distribution).
  Eigen::Vector3d axis() const;
};

struct EquivalentSet {
  std::vector<UnitQuaternion> quaternions;
  UnitQuaternion ground_truth;
  SymmetryKind kind = SymmetryKind::asymmetric;

  std::size_t size() const { return quaternions.size(); }
};

/// normalize(pi_x e_x + pi_y e_y + pi_z e_z). Throws DegenerateAxis when the
/// combination has norm < 1e-9.
Eigen::Vector3d synth_axis(const Eigen::Vector3d& distribution);

struct PlaneTriple {
  Eigen::Vector3d n;
  Eigen::Vector3d n_prime;
  Eigen::Vector3d n_double_prime;

  std::array<Eigen::Vector3d, 3> as_array() const {
    return {n, n_prime, n_double_prime};
  }
};

/// Completes a right-handed orthonormal triple from n and a raw secondary
/// direction. Throws ParallelInput when n_raw is within 1e-4 rad of +-n.
PlaneTriple orthonormal_triple(const Eigen::Vector3d& n,
                               const Eigen::Vector3d& n_raw);

/// {q_gt ⊗ exp(theta_i axis)}, theta_i = 2 pi i / n_eq. The axis lives in the
/// part frame, so the rotation multiplies q_gt on the right. Element 0 is q_gt.
EquivalentSet equivalent_set_rotational(const UnitQuaternion& q_gt,
                                        const Eigen::Vector3d& axis, int n_eq);

/// q_gt together with q_gt ⊗ r_u for every plane normal u, where r_u is the
/// half-turn about u, closed under products of the generators. The closure is
/// capped at 64 elements for non-orthogonal normals.
EquivalentSet equivalent_set_mirror(const UnitQuaternion& q_gt,
                                    std::span<const Eigen::Vector3d> planes);

/// Mirror of every point across the plane through the centroid with normal u.
PointCloud reflect_cloud(std::span<const Eigen::Vector3d> cloud,
                         const Eigen::Vector3d& u);

/// Bidirectional Chamfer distance between a cloud and its reflection.
double mirror_consistency(std::span<const Eigen::Vector3d> cloud,
                          const Eigen::Vector3d& u);

/// Normalized inverse-consistency scores of three candidate planes.
std::array<double, 3> plane_scores(std::span<const Eigen::Vector3d> cloud,
                                   const std::array<Eigen::Vector3d, 3>& planes,
                                   double epsilon = 1e-8);

/// The same scores from precomputed consistencies.
std::array<double, 3> plane_scores_from_consistency(
    const std::array<double, 3>& consistency, double epsilon = 1e-8);

struct RotationalAxisEstimate {
  Eigen::Vector3d axis;
  Eigen::Vector3d distribution;
  /// Mean rotational Chamfer inconsistency per canonical axis.
  Eigen::Vector3d inconsistency;
};

/// Scores each canonical axis by how little the centered cloud changes under
/// rotations about it, and turns the scores into an axis distribution.
RotationalAxisEstimate estimate_rotational_axis(
    std::span<const Eigen::Vector3d> cloud, int n_probe_angles = 8);

struct MirrorPlaneEstimate {
  SymmetrySpec spec;
  std::array<Eigen::Vector3d, 3> candidates;
  std::array<double, 3> consistency{};
  std::array<double, 3> scores{};
};

/// Builds the candidate triple from the most likely canonical axis (principal
/// normal) and the runner-up (secondary direction), scores it, and keeps the
/// planes whose score reaches `keep_threshold`. The kept set may be empty.
MirrorPlaneEstimate evaluate_mirror_planes(std::span<const Eigen::Vector3d> cloud,
                                           double keep_threshold = 0.25,
                                           int n_probe_angles = 8);

/// evaluate_mirror_planes, throwing NoPlaneRetained when no plane is kept.
MirrorPlaneEstimate estimate_mirror_planes(std::span<const Eigen::Vector3d> cloud,
                                           double keep_threshold = 0.25,
                                           int n_probe_angles = 8);

}  // namespace s3pose
