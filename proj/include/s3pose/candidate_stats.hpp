#pragma once

// Summary statistics of a candidate quaternion set: residuals to the mean,
// tangent offsets, mean offset, concentration and the eigenstructure of the
// offset second-moment matrix, flattened into a 16-dimensional feature.

#include <Eigen/Core>
#include <array>
#include <span>
#include <vector>

#include "s3pose/quaternion.hpp"

namespace s3pose {

using CandidateSet = std::vector<UnitQuaternion>;

struct EigenDecomposition {
  /// Sorted descending.
  std::array<double, 3> values{};
  /// Unit eigenvectors matching `values`; each one's largest-magnitude
  /// component is positive.
  std::array<Eigen::Vector3d, 3> vectors{Eigen::Vector3d::UnitX(),
                                         Eigen::Vector3d::UnitY(),
                                         Eigen::Vector3d::UnitZ()};
};

struct CandidateFeature {
  static constexpr std::size_t kSize = 16;

  Eigen::Vector3d mean_offset = Eigen::Vector3d::Zero();
  double concentration = 1.0;
  EigenDecomposition moments;

  /// [mean_offset, concentration, l1, l2, l3, v1, v2, v3].
  std::array<double, kSize> flatten() const;
};

/// r_i = q_mean^-1 ⊗ q_i, each flipped to the w >= 0 hemisphere.
std::vector<UnitQuaternion> residuals(std::span<const UnitQuaternion> candidates,
                                      const UnitQuaternion& q_mean);

std::vector<TangentVector> tangent_offsets(
    std::span<const UnitQuaternion> residuals);

Eigen::Vector3d mean_offset(std::span<const TangentVector> offsets);

/// (1/K) sum_i <q_i, q_mean>^2, in [0, 1].
double concentration(std::span<const UnitQuaternion> candidates,
                     const UnitQuaternion& q_mean);

/// Eigenpairs of M = (1/K) sum_i d_i d_i^T.
///
/// Eigenvalues closer than 1e-10 share an eigenspace whose basis is rebuilt by
/// Gram-Schmidt over the canonical axes in x, y, z order, so the output is a
/// deterministic function of M even for repeated eigenvalues.
EigenDecomposition second_moment_eig(std::span<const TangentVector> offsets);

/// Same canonicalized decomposition for an arbitrary symmetric 3x3 matrix.
EigenDecomposition symmetric_eig(const Eigen::Matrix3d& m);

CandidateFeature encode(std::span<const UnitQuaternion> candidates);

}  // namespace s3pose
