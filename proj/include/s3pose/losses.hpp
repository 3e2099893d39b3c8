#pragma once

// Symmetry-aware rotation objectives with a temperature-controlled soft-min,
// plus central-difference gradients on the rotation manifold.

#include <Eigen/Core>
#include <array>
#include <functional>
#include <span>

#include "s3pose/point_cloud.hpp"
#include "s3pose/quaternion.hpp"
#include "s3pose/symmetry.hpp"

namespace s3pose {

struct SoftMinConfig {
  double beta = 10.0;
};

/// Boltzmann-weighted average sum_i w_i x_i, w_i ∝ exp(-beta (x_i - min x)).
/// Lies in [min x, min x + log(N) / beta]. Requires a non-empty input.
double softmin(std::span<const double> values, SoftMinConfig cfg = {});

/// Plain minimum, the beta -> infinity limit used for evaluation.
double hardmin(std::span<const double> values);

/// softmin_i angular_distance(q, eq_i).
double soft_distance(const UnitQuaternion& q, const EquivalentSet& eq,
                     SoftMinConfig cfg = {});

/// Equivalent sets about the canonical x, y and z axes.
std::array<EquivalentSet, 3> canonical_rotational_sets(const UnitQuaternion& q_gt,
                                                       int n_eq);

/// Equivalent sets of the single canonical planes x, y and z.
std::array<EquivalentSet, 3> canonical_mirror_sets(const UnitQuaternion& q_gt);

/// Warm-up loss: for each canonical hypothesis the candidates' mean soft
/// distance to its set, then the hard minimum over hypotheses. Only the inner
/// minimum is relaxed.
double warmup_loss(std::span<const UnitQuaternion> candidates,
                   const std::array<EquivalentSet, 3>& hypotheses,
                   SoftMinConfig cfg = {});

/// Warm-up rotational loss over the canonical axes with n_eq samples each.
double warmup_rot_loss(std::span<const UnitQuaternion> candidates,
                       const UnitQuaternion& q_gt, int n_eq,
                       SoftMinConfig cfg = {});

/// (1/K) sum_j softmin_i angular_distance(q_j, eq_i).
double cand_rot_loss(std::span<const UnitQuaternion> candidates,
                     const EquivalentSet& eq, SoftMinConfig cfg = {});

/// softmin_i angular_distance(q_final, eq_i).
double final_rot_loss(const UnitQuaternion& q_final, const EquivalentSet& eq,
                      SoftMinConfig cfg = {});

enum class Stage { warmup, main };

struct MirrorLossTerms {
  double angle = 0.0;
  double geom = 0.0;
  double total() const { return angle + geom; }
};

/// Mirror loss split into its two unit-weighted terms.
///
/// Warm-up: the angle term is the warm-up loss over the single-plane sets of
/// the canonical planes and the geometric term averages mirror consistency
/// over x, y and z. Main: the angle term is the candidate loss plus the final
/// loss against the set generated by spec.plane_normals, and the geometric
/// term averages over those normals. Throws EmptyPlaneSet in the main stage
/// when spec has no planes.
MirrorLossTerms mirror_loss_terms(const UnitQuaternion& q_final,
                                  std::span<const UnitQuaternion> candidates,
                                  std::span<const Eigen::Vector3d> cloud,
                                  const UnitQuaternion& q_gt,
                                  const SymmetrySpec& spec, Stage stage,
                                  SoftMinConfig cfg = {});

double mirror_loss(const UnitQuaternion& q_final,
                   std::span<const UnitQuaternion> candidates,
                   std::span<const Eigen::Vector3d> cloud,
                   const UnitQuaternion& q_gt, const SymmetrySpec& spec,
                   Stage stage, SoftMinConfig cfg = {});

/// Mean mirror consistency over a set of plane normals.
double mean_mirror_consistency(std::span<const Eigen::Vector3d> cloud,
                               std::span<const Eigen::Vector3d> normals);

/// Angular deviation from the ground truth, for asymmetric parts.
double asym_loss(const UnitQuaternion& q, const UnitQuaternion& q_gt);

/// Rotation plus translation; same layout as RigidTransform.
using PoseEstimate = RigidTransform;

using PoseObjective = std::function<double(const PoseEstimate&)>;
using RotationObjective = std::function<double(const UnitQuaternion&)>;

struct PoseGradient {
  Eigen::Vector3d rotation = Eigen::Vector3d::Zero();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
};

/// Central differences along the tangent basis (perturbation exp(±h e_k) ⊗ q)
/// and the three translation axes. Requires h in (1e-7, 1e-2); throws
/// NonFiniteObjective if any probe is NaN or infinite.
PoseGradient loss_gradient(const PoseObjective& objective, const PoseEstimate& at,
                           double h = 1e-4);

/// The rotational block of loss_gradient for objectives of rotation only.
Eigen::Vector3d rotation_gradient(const RotationObjective& objective,
                                  const UnitQuaternion& q, double h = 1e-4);

}  // namespace s3pose
