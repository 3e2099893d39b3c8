#include "s3pose/candidate_stats.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "s3pose/errors.hpp"

namespace s3pose {

namespace {

constexpr double kRepeatedEigenvalue = 1e-10;

void canonicalize_sign(Eigen::Vector3d& v) {
  Eigen::Index largest = 0;
  v.cwiseAbs().maxCoeff(&largest);
  if (v[largest] < 0.0) v = -v;
}

}  // namespace

std::array<double, CandidateFeature::kSize> CandidateFeature::flatten() const {
  std::array<double, kSize> out{};
  std::size_t i = 0;
  for (int k = 0; k < 3; ++k) out[i++] = mean_offset[k];
  out[i++] = concentration;
  for (double l : moments.values) out[i++] = l;
  for (const auto& v : moments.vectors) {
    for (int k = 0; k < 3; ++k) out[i++] = v[k];
  }
  return out;
}

std::vector<UnitQuaternion> residuals(std::span<const UnitQuaternion> candidates,
                                      const UnitQuaternion& q_mean) {
  const UnitQuaternion mean_inv = inverse(q_mean);
  std::vector<UnitQuaternion> out;
  out.reserve(candidates.size());
  for (const auto& q : candidates) {
    out.push_back(
        hemisphere_align(compose(mean_inv, q), UnitQuaternion::identity()));
  }
  return out;
}

std::vector<TangentVector> tangent_offsets(
    std::span<const UnitQuaternion> residuals) {
  std::vector<TangentVector> out;
  out.reserve(residuals.size());
  for (const auto& r : residuals) out.push_back(log_map(r));
  return out;
}

Eigen::Vector3d mean_offset(std::span<const TangentVector> offsets) {
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  for (const auto& d : offsets) sum += d.vector();
  return offsets.empty() ? sum : Eigen::Vector3d(sum / double(offsets.size()));
}

double concentration(std::span<const UnitQuaternion> candidates,
                     const UnitQuaternion& q_mean) {
  if (candidates.empty()) return 1.0;
  double sum = 0.0;
  for (const auto& q : candidates) {
    const double c = q.dot(q_mean);
    sum += c * c;
  }
  return std::clamp(sum / double(candidates.size()), 0.0, 1.0);
}

EigenDecomposition symmetric_eig(const Eigen::Matrix3d& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(m);
  // Solver output is ascending; reorder descending.
  EigenDecomposition out;
  for (int k = 0; k < 3; ++k) {
    out.values[k] = solver.eigenvalues()[2 - k];
    out.vectors[k] = solver.eigenvectors().col(2 - k);
  }

  // Rebuild the basis of every cluster of (numerically) equal eigenvalues.
  int begin = 0;
  while (begin < 3) {
    int end = begin + 1;
    while (end < 3 &&
           std::abs(out.values[end - 1] - out.values[end]) < kRepeatedEigenvalue) {
      ++end;
    }
    if (end - begin > 1) {
      Eigen::Matrix3d projector = Eigen::Matrix3d::Zero();
      for (int k = begin; k < end; ++k) {
        projector += out.vectors[k] * out.vectors[k].transpose();
      }
      int filled = begin;
      for (int axis = 0; axis < 3 && filled < end; ++axis) {
        Eigen::Vector3d v = projector.col(axis);  // P e_axis
        for (int k = begin; k < filled; ++k) {
          v -= out.vectors[k].dot(v) * out.vectors[k];
        }
        const double n = v.norm();
        if (n > 1e-6) out.vectors[filled++] = v / n;
      }
    }
    begin = end;
  }
  for (auto& v : out.vectors) canonicalize_sign(v);
  return out;
}

EigenDecomposition second_moment_eig(std::span<const TangentVector> offsets) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  for (const auto& d : offsets) {
    m.noalias() += d.vector() * d.vector().transpose();
  }
  if (!offsets.empty()) m /= double(offsets.size());
  return symmetric_eig(m);
}

CandidateFeature encode(std::span<const UnitQuaternion> candidates) {
  if (candidates.empty()) {
    throw DegenerateMean("cannot encode an empty candidate set");
  }
  const UnitQuaternion q_mean = mean_quaternion(candidates);
  const auto offsets = tangent_offsets(residuals(candidates, q_mean));

  CandidateFeature feature;
  feature.mean_offset = mean_offset(offsets);
  feature.concentration = concentration(candidates, q_mean);
  feature.moments = second_moment_eig(offsets);
  return feature;
}

}  // namespace s3pose
