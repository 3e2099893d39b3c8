#include "s3pose/quaternion.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "s3pose/errors.hpp"

namespace s3pose {

namespace {

constexpr double kMinNorm = 1e-12;
constexpr double kSmallAngle = 1e-8;

}  // namespace

UnitQuaternion normalize(const Eigen::Vector4d& v) {
  const double n = v.norm();
  if (!(n > kMinNorm)) {
    throw NearZeroNorm("cannot normalize a quaternion with norm <= 1e-12");
  }
  return {v[0] / n, v[1] / n, v[2] / n, v[3] / n};
}

Eigen::Vector3d UnitQuaternion::rotate(const Eigen::Vector3d& p) const {
  // p' = p + 2w (v x p) + 2 v x (v x p)
  const Eigen::Vector3d v = vec();
  const Eigen::Vector3d t = 2.0 * v.cross(p);
  return p + w_ * t + v.cross(t);
}

UnitQuaternion compose(const UnitQuaternion& a, const UnitQuaternion& b) {
  return normalize(Eigen::Vector4d(
      a.w() * b.w() - a.x() * b.x() - a.y() * b.y() - a.z() * b.z(),
      a.w() * b.x() + a.x() * b.w() + a.y() * b.z() - a.z() * b.y(),
      a.w() * b.y() - a.x() * b.z() + a.y() * b.w() + a.z() * b.x(),
      a.w() * b.z() + a.x() * b.y() - a.y() * b.x() + a.z() * b.w()));
}

UnitQuaternion inverse(const UnitQuaternion& q) {
  return normalize(Eigen::Vector4d(q.w(), -q.x(), -q.y(), -q.z()));
}

UnitQuaternion hemisphere_align(const UnitQuaternion& q,
                                const UnitQuaternion& ref) {
  return q.dot(ref) < 0.0 ? -q : q;
}

TangentVector log_map(const UnitQuaternion& q) {
  const UnitQuaternion p = q.w() < 0.0 ? -q : q;
  const Eigen::Vector3d v = p.vec();
  const double s = v.norm();
  if (s < kSmallAngle) {
    // theta / sin(theta/2) -> 2 / cos(theta/2) to third order.
    return TangentVector(2.0 * v / p.w());
  }
  const double theta = 2.0 * std::atan2(s, p.w());
  return TangentVector(v * (theta / s));
}

UnitQuaternion exp_map(const TangentVector& delta) {
  const Eigen::Vector3d& d = delta.vector();
  const double theta = d.norm();
  if (theta < kSmallAngle) {
    const double t2 = theta * theta;
    const double w = 1.0 - t2 / 8.0;
    const Eigen::Vector3d v = d * (0.5 - t2 / 48.0);
    return normalize(Eigen::Vector4d(w, v.x(), v.y(), v.z()));
  }
  const double half = 0.5 * theta;
  const Eigen::Vector3d v = d * (std::sin(half) / theta);
  return normalize(Eigen::Vector4d(std::cos(half), v.x(), v.y(), v.z()));
}

double angular_distance(const UnitQuaternion& q1, const UnitQuaternion& q2) {
  // For unit a, b at R^4 angle phi: |a - b| = 2 sin(phi/2), |a + b| =
  // 2 cos(phi/2), and the rotation angle is 2 phi.
  const Eigen::Vector4d a = q1.coeffs();
  const Eigen::Vector4d b = q1.dot(q2) < 0.0 ? Eigen::Vector4d(-q2.coeffs())
                                             : q2.coeffs();
  return 4.0 * std::atan2((a - b).norm(), (a + b).norm());
}

UnitQuaternion mean_quaternion(std::span<const UnitQuaternion> quaternions) {
  if (quaternions.empty()) {
    throw DegenerateMean("mean of an empty quaternion set");
  }
  Eigen::Matrix4d scatter = Eigen::Matrix4d::Zero();
  for (const auto& q : quaternions) {
    const Eigen::Vector4d c = q.coeffs();
    scatter.noalias() += c * c.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> solver(scatter);
  Eigen::Vector4d ref = solver.eigenvectors().col(3);
  Eigen::Index largest = 0;
  ref.cwiseAbs().maxCoeff(&largest);
  if (ref[largest] < 0.0) ref = -ref;
  const UnitQuaternion reference = normalize(ref);

  Eigen::Vector4d sum = Eigen::Vector4d::Zero();
  for (const auto& q : quaternions) {
    sum += hemisphere_align(q, reference).coeffs();
  }
  sum /= double(quaternions.size());
  if (sum.norm() <= 1e-9) {
    throw DegenerateMean("sign-aligned quaternion mean vanishes");
  }
  return normalize(sum);
}

RigidTransform se3_compose(const RigidTransform& a, const RigidTransform& b) {
  return {compose(a.rotation, b.rotation),
          a.rotation.rotate(b.translation) + a.translation};
}

RigidTransform se3_inverse(const RigidTransform& t) {
  const UnitQuaternion r = inverse(t.rotation);
  return {r, -r.rotate(t.translation)};
}

}  // namespace s3pose
