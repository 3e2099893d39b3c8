#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <span>
#include <vector>

namespace s3pose {

/// Ordered list of 3D points in meters.
using PointCloud = std::vector<Eigen::Vector3d>;

inline Eigen::Vector3d centroid(std::span<const Eigen::Vector3d> points) {
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  for (const auto& p : points) sum += p;
  return points.empty() ? sum : Eigen::Vector3d(sum / double(points.size()));
}

}  // namespace s3pose
