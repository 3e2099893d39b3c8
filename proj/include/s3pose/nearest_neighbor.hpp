#pragma once

#include <Eigen/Core>
#include <array>
#include <span>
#include <vector>

#include "s3pose/point_cloud.hpp"

namespace s3pose {

/// Exact Euclidean nearest-neighbor queries against a fixed point set.
///
/// Small sets (< 256 points) are scanned linearly; larger ones are bucketed in
/// a uniform grid and searched ring by ring until no unvisited cell can hold a
/// closer point.
class NearestNeighborIndex {
 public:
  static constexpr std::size_t kBruteForceBelow = 256;

  explicit NearestNeighborIndex(PointCloud points);

  /// Distance from `query` to the closest indexed point. Requires a non-empty
  /// index.
  double nearest_distance(const Eigen::Vector3d& query) const;

  std::size_t size() const { return points_.size(); }
  const PointCloud& points() const { return points_; }

 private:
  double brute_force(const Eigen::Vector3d& query) const;
  std::size_t cell_index(int ix, int iy, int iz) const {
    return (std::size_t(iz) * dims_[1] + std::size_t(iy)) * dims_[0] +
           std::size_t(ix);
  }

  PointCloud points_;
  bool use_grid_ = false;
  Eigen::Vector3d lower_ = Eigen::Vector3d::Zero();
  double cell_ = 1.0;
  std::array<int, 3> dims_{1, 1, 1};
  std::vector<std::size_t> cell_start_;  // CSR offsets, size cells + 1
  PointCloud sorted_;                    // points grouped by cell
};

/// (1/|A|) sum_{a in A} min_{b in B} |a - b|.
double chamfer_one_sided(std::span<const Eigen::Vector3d> a,
                         const NearestNeighborIndex& b);
double chamfer_one_sided(std::span<const Eigen::Vector3d> a,
                         std::span<const Eigen::Vector3d> b);

/// 0.5 (d(A, B) + d(B, A)).
double chamfer_bidirectional(std::span<const Eigen::Vector3d> a,
                             std::span<const Eigen::Vector3d> b);

}  // namespace s3pose
