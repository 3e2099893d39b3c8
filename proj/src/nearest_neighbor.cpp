#include "s3pose/nearest_neighbor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace s3pose {

namespace {

constexpr int kMaxCellsPerAxis = 64;

}  // namespace

NearestNeighborIndex::NearestNeighborIndex(PointCloud points)
    : points_(std::move(points)) {
  use_grid_ = points_.size() >= kBruteForceBelow;
  if (!use_grid_) return;

  Eigen::Vector3d lo = points_.front();
  Eigen::Vector3d hi = points_.front();
  for (const auto& p : points_) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Eigen::Vector3d extent = (hi - lo).cwiseMax(1e-9);
  // Surface samples fill a 2D shell, so size cells for ~2 points per cell on
  // the bounding-box surface rather than its volume.
  const double area = 2.0 * (extent.x() * extent.y() + extent.y() * extent.z() +
                             extent.z() * extent.x());
  cell_ = std::sqrt(2.0 * area / double(points_.size()));
  cell_ = std::max(cell_, extent.maxCoeff() / kMaxCellsPerAxis);
  lower_ = lo;
  for (int k = 0; k < 3; ++k) {
    dims_[k] = std::clamp(int(std::floor(extent[k] / cell_)) + 1, 1,
                          kMaxCellsPerAxis + 1);
  }

  const std::size_t n_cells = std::size_t(dims_[0]) * dims_[1] * dims_[2];
  std::vector<std::size_t> owner(points_.size());
  std::vector<std::size_t> counts(n_cells + 1, 0);
  for (std::size_t i = 0; i < points_.size(); ++i) {
    int c[3];
    for (int k = 0; k < 3; ++k) {
      c[k] = std::clamp(int((points_[i][k] - lower_[k]) / cell_), 0,
                        dims_[k] - 1);
    }
    owner[i] = cell_index(c[0], c[1], c[2]);
    ++counts[owner[i] + 1];
  }
  for (std::size_t c = 0; c < n_cells; ++c) counts[c + 1] += counts[c];
  cell_start_ = counts;
  sorted_.resize(points_.size());
  std::vector<std::size_t> cursor(counts.begin(), counts.end() - 1);
  for (std::size_t i = 0; i < points_.size(); ++i) {
    sorted_[cursor[owner[i]]++] = points_[i];
  }
}

double NearestNeighborIndex::brute_force(const Eigen::Vector3d& query) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : points_) best = std::min(best, (p - query).squaredNorm());
  return std::sqrt(best);
}

double NearestNeighborIndex::nearest_distance(const Eigen::Vector3d& query) const {
  if (!use_grid_) return brute_force(query);

  int c[3];
  for (int k = 0; k < 3; ++k) {
    c[k] = std::clamp(int(std::floor((query[k] - lower_[k]) / cell_)), 0,
                      dims_[k] - 1);
  }
  const int max_ring = std::max({dims_[0], dims_[1], dims_[2]});
  double best = std::numeric_limits<double>::infinity();

  for (int ring = 0; ring <= max_ring; ++ring) {
    const int lo[3] = {std::max(c[0] - ring, 0), std::max(c[1] - ring, 0),
                       std::max(c[2] - ring, 0)};
    const int hi[3] = {std::min(c[0] + ring, dims_[0] - 1),
                       std::min(c[1] + ring, dims_[1] - 1),
                       std::min(c[2] + ring, dims_[2] - 1)};
    for (int iz = lo[2]; iz <= hi[2]; ++iz) {
      const bool z_edge = std::abs(iz - c[2]) == ring;
      for (int iy = lo[1]; iy <= hi[1]; ++iy) {
        const bool yz_edge = z_edge || std::abs(iy - c[1]) == ring;
        for (int ix = lo[0]; ix <= hi[0]; ++ix) {
          // Only the shell at Chebyshev distance `ring` is new.
          if (!yz_edge && std::abs(ix - c[0]) != ring) {
            ix = std::max(ix, c[0] + ring - 1);
            continue;
          }
          const std::size_t cell = cell_index(ix, iy, iz);
          for (std::size_t i = cell_start_[cell]; i < cell_start_[cell + 1]; ++i) {
            best = std::min(best, (sorted_[i] - query).squaredNorm());
          }
        }
      }
    }

    // Every unvisited cell is at least ring+1 cells away along some axis;
    // bound the distance to the nearest such slab.
    double bound = std::numeric_limits<double>::infinity();
    bool any_left = false;
    for (int k = 0; k < 3; ++k) {
      if (c[k] - ring - 1 >= 0) {
        any_left = true;
        const double edge = lower_[k] + (c[k] - ring) * cell_;
        bound = std::min(bound, std::max(0.0, query[k] - edge));
      }
      if (c[k] + ring + 1 <= dims_[k] - 1) {
        any_left = true;
        const double edge = lower_[k] + (c[k] + ring + 1) * cell_;
        bound = std::min(bound, std::max(0.0, edge - query[k]));
      }
    }
    if (!any_left || best <= bound * bound) break;
  }
  return std::sqrt(best);
}

double chamfer_one_sided(std::span<const Eigen::Vector3d> a,
                         const NearestNeighborIndex& b) {
  double sum = 0.0;
  for (const auto& p : a) sum += b.nearest_distance(p);
  return a.empty() ? 0.0 : sum / double(a.size());
}

double chamfer_one_sided(std::span<const Eigen::Vector3d> a,
                         std::span<const Eigen::Vector3d> b) {
  return chamfer_one_sided(a, NearestNeighborIndex(PointCloud(b.begin(), b.end())));
}

double chamfer_bidirectional(std::span<const Eigen::Vector3d> a,
                             std::span<const Eigen::Vector3d> b) {
  return 0.5 * (chamfer_one_sided(a, b) + chamfer_one_sided(b, a));
}

}  // namespace s3pose
