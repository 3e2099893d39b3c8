#pragma once

// Point-wise local reference frames: spatial KNN, neighborhood covariance,
// power-iteration principal direction, reference-vector frame completion,
// local projection, and the trace/anisotropy descriptors of the covariance.

#include <Eigen/Core>
#include <optional>
#include <span>
#include <vector>

#include "s3pose/point_cloud.hpp"

namespace s3pose {

struct Neighborhood {
  std::size_t center_index = 0;
  /// Sorted by distance, ties by index; never contains center_index.
  std::vector<std::size_t> neighbor_indices;
  /// p_j - p_i for each neighbor j.
  std::vector<Eigen::Vector3d> directions;
};

/// Columns e1, e2, e3 of a rotation matrix.
struct LocalFrame {
  Eigen::Vector3d e1 = Eigen::Vector3d::UnitX();
  Eigen::Vector3d e2 = Eigen::Vector3d::UnitY();
  Eigen::Vector3d e3 = Eigen::Vector3d::UnitZ();

  Eigen::Matrix3d matrix() const {
    Eigen::Matrix3d m;
    m << e1, e2, e3;
    return m;
  }
};

/// Power-iteration start vector, (1, 1, 1)/sqrt(3).
Eigen::Vector3d default_start_vector();

/// The m points closest to p_i (p_i excluded). Requires |P| >= 2, m >= 1.
Neighborhood knn(std::span<const Eigen::Vector3d> cloud, std::size_t i,
                 std::size_t m);

/// S = (1/M) sum_j R_ij R_ij^T.
Eigen::Matrix3d covariance(const Neighborhood& nb);

/// `iters` steps of v <- S v / |S v| from v0, then the sign that makes the
/// largest-magnitude component positive. Throws DegenerateCovariance when an
/// iterate norm drops to 1e-12.
Eigen::Vector3d principal_direction(const Eigen::Matrix3d& s,
                                    const Eigen::Vector3d& v0 = default_start_vector(),
                                    int iters = 1);

/// e2 = e1 x t / |e1 x t| with t = x, or t = y when |e1 . x| > 0.99;
/// e3 = e1 x e2.
LocalFrame build_frame(const Eigen::Vector3d& e1);

/// E^T d for every direction.
std::vector<Eigen::Vector3d> project_local(const LocalFrame& frame,
                                           std::span<const Eigen::Vector3d> directions);

struct FrameFeatures {
  double trace = 0.0;
  double anisotropy = 0.0;  // |S - (tr/3) I|_F^2
};

FrameFeatures frame_features(const Eigen::Matrix3d& s);

struct PointFrame {
  /// Empty when the neighborhood covariance is degenerate.
  std::optional<LocalFrame> frame;
  FrameFeatures features;
};

/// knn -> covariance -> principal_direction -> build_frame -> frame_features
/// for every point. Requires |P| >= m + 1.
std::vector<PointFrame> cloud_frames(std::span<const Eigen::Vector3d> cloud,
                                     std::size_t m = 8, int iters = 1);

}  // namespace s3pose
