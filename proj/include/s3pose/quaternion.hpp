#pragma once

// Unit quaternions on S^3, their tangent space and rigid transforms.
//
// Conventions: Hamilton product, scalar-first storage (w, x, y, z), and a
// quaternion q acts on a point p as q p q^-1. q and -q are the same rotation.

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <span>
#include <vector>

namespace s3pose {

class UnitQuaternion {
 public:
  /// The identity rotation.
  UnitQuaternion() = default;

  static UnitQuaternion identity() { return {}; }

  double w() const { return w_; }
  double x() const { return x_; }
  double y() const { return y_; }
  double z() const { return z_; }

  /// Coefficients in (w, x, y, z) order.
  Eigen::Vector4d coeffs() const { return {w_, x_, y_, z_}; }
  Eigen::Vector3d vec() const { return {x_, y_, z_}; }

  UnitQuaternion operator-() const { return {-w_, -x_, -y_, -z_}; }

  /// Euclidean inner product in R^4.
  double dot(const UnitQuaternion& other) const {
    return w_ * other.w_ + x_ * other.x_ + y_ * other.y_ + z_ * other.z_;
  }

  /// Applies the rotation to a 3-vector.
  Eigen::Vector3d rotate(const Eigen::Vector3d& p) const;

  friend UnitQuaternion normalize(const Eigen::Vector4d& v);

 private:
  UnitQuaternion(double w, double x, double y, double z)
      : w_(w), x_(x), y_(y), z_(z) {}

  double w_ = 1.0;
  double x_ = 0.0;
  double y_ = 0.0;
  double z_ = 0.0;
};

/// Axis-angle element theta * n of the tangent space at a quaternion.
class TangentVector {
 public:
  TangentVector() = default;
  explicit TangentVector(const Eigen::Vector3d& v) : v_(v) {}
  TangentVector(double dx, double dy, double dz) : v_(dx, dy, dz) {}

  const Eigen::Vector3d& vector() const { return v_; }
  double angle() const { return v_.norm(); }

 private:
  Eigen::Vector3d v_ = Eigen::Vector3d::Zero();
};

/// Scales a 4-vector onto S^3. Throws NearZeroNorm when |v| <= 1e-12.
UnitQuaternion normalize(const Eigen::Vector4d& v);

/// Hamilton product a ⊗ b, renormalized. R(a ⊗ b) = R(a) R(b).
UnitQuaternion compose(const UnitQuaternion& a, const UnitQuaternion& b);

/// Conjugate, which is the inverse on S^3.
UnitQuaternion inverse(const UnitQuaternion& q);

/// Returns q or -q, whichever has a non-negative inner product with ref.
/// A zero inner product keeps q.
UnitQuaternion hemisphere_align(const UnitQuaternion& q,
                                const UnitQuaternion& ref);

/// Principal-branch logarithm: picks the w >= 0 representative, so the
/// returned angle lies in [0, pi].
TangentVector log_map(const UnitQuaternion& q);

/// (cos(theta/2), sin(theta/2) n) with theta = |delta|.
UnitQuaternion exp_map(const TangentVector& delta);

/// Rotation angle between q1 and q2 in radians, 2 acos(|<q1, q2>|), in
/// [0, pi]. Evaluated through an atan2 form that stays accurate near zero.
double angular_distance(const UnitQuaternion& q1, const UnitQuaternion& q2);

/// Sign-aligned average of a quaternion set, renormalized to unit length.
///
/// Every element is flipped into the hemisphere of a reference direction and
/// the flipped elements are averaged. The reference is the dominant
/// eigenvector of sum_i q_i q_i^T, i.e. the naive mean taken over the sign
/// classes, so the result does not depend on the sign or order of the inputs.
/// Throws DegenerateMean for an empty set or a vanishing aligned sum.
UnitQuaternion mean_quaternion(std::span<const UnitQuaternion> quaternions);

struct RigidTransform {
  UnitQuaternion rotation;
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const {
    return rotation.rotate(p) + translation;
  }
};

/// (R_a R_b, R_a t_b + t_a).
RigidTransform se3_compose(const RigidTransform& a, const RigidTransform& b);

/// (R^-1, -R^-1 t).
RigidTransform se3_inverse(const RigidTransform& t);

}  // namespace s3pose
