#include "s3pose/local_frames.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "s3pose/errors.hpp"

namespace s3pose {

namespace {

constexpr double kCollinear = 0.99;
constexpr double kMinIterateNorm = 1e-12;

}  // namespace

Eigen::Vector3d default_start_vector() {
  return Eigen::Vector3d::Ones().normalized();
}

Neighborhood knn(std::span<const Eigen::Vector3d> cloud, std::size_t i,
                 std::size_t m) {
  if (cloud.size() < 2 || i >= cloud.size() || m < 1) {
    throw std::invalid_argument("knn needs |P| >= 2, a valid index and m >= 1");
  }
  std::vector<std::pair<double, std::size_t>> ranked;
  ranked.reserve(cloud.size() - 1);
  for (std::size_t j = 0; j < cloud.size(); ++j) {
    if (j != i) ranked.emplace_back((cloud[j] - cloud[i]).squaredNorm(), j);
  }
  const std::size_t count = std::min(m, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + std::ptrdiff_t(count),
                    ranked.end());

  Neighborhood nb;
  nb.center_index = i;
  for (std::size_t k = 0; k < count; ++k) {
    nb.neighbor_indices.push_back(ranked[k].second);
    nb.directions.push_back(cloud[ranked[k].second] - cloud[i]);
  }
  return nb;
}

Eigen::Matrix3d covariance(const Neighborhood& nb) {
  Eigen::Matrix3d s = Eigen::Matrix3d::Zero();
  for (const auto& r : nb.directions) s.noalias() += r * r.transpose();
  if (!nb.directions.empty()) s /= double(nb.directions.size());
  return s;
}

Eigen::Vector3d principal_direction(const Eigen::Matrix3d& s,
                                    const Eigen::Vector3d& v0, int iters) {
  Eigen::Vector3d v = v0;
  for (int it = 0; it < std::max(iters, 1); ++it) {
    const Eigen::Vector3d next = s * v;
    const double n = next.norm();
    if (!(n > kMinIterateNorm)) {
      throw DegenerateCovariance("power iteration collapsed to the null space");
    }
    v = next / n;
  }
  Eigen::Index largest = 0;
  v.cwiseAbs().maxCoeff(&largest);
  return v[largest] < 0.0 ? Eigen::Vector3d(-v) : v;
}

LocalFrame build_frame(const Eigen::Vector3d& e1_in) {
  // Inputs may be off unit length by round-off; the frame must not be.
  const Eigen::Vector3d e1 = e1_in.normalized();
  Eigen::Vector3d t = Eigen::Vector3d::UnitX();
  if (std::abs(e1.dot(t)) > kCollinear) t = Eigen::Vector3d::UnitY();
  LocalFrame f;
  f.e1 = e1;
  f.e2 = e1.cross(t).normalized();
  f.e3 = e1.cross(f.e2);
  return f;
}

std::vector<Eigen::Vector3d> project_local(const LocalFrame& frame,
                                           std::span<const Eigen::Vector3d> directions) {
  std::vector<Eigen::Vector3d> out;
  out.reserve(directions.size());
  for (const auto& d : directions) {
    out.emplace_back(frame.e1.dot(d), frame.e2.dot(d), frame.e3.dot(d));
  }
  return out;
}

FrameFeatures frame_features(const Eigen::Matrix3d& s) {
  FrameFeatures f;
  f.trace = s.trace();
  const Eigen::Matrix3d deviator = s - (f.trace / 3.0) * Eigen::Matrix3d::Identity();
  f.anisotropy = deviator.squaredNorm();
  return f;
}

std::vector<PointFrame> cloud_frames(std::span<const Eigen::Vector3d> cloud,
                                     std::size_t m, int iters) {
  if (cloud.size() < m + 1) {
    throw std::invalid_argument("cloud_frames needs at least m + 1 points");
  }
  std::vector<PointFrame> frames(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Eigen::Matrix3d s = covariance(knn(cloud, i, m));
    frames[i].features = frame_features(s);
    try {
      frames[i].frame = build_frame(principal_direction(s, default_start_vector(), iters));
    } catch (const DegenerateCovariance&) {
      frames[i].frame.reset();
    }
  }
  return frames;
}

}  // namespace s3pose
