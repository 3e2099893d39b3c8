#pragma once

#include <cstdint>
#include <random>

#include "s3pose/point_cloud.hpp"
#include "s3pose/quaternion.hpp"
#include "s3pose/shapes.hpp"

namespace s3pose {

struct Scene {
  PointCloud model;  // canonical frame
  PointCloud observed;
  RigidTransform gt;
  double noise_sigma = 0.0;
  double crop_fraction = 0.0;
};

/// Uniform on SO(3): a normalized 4-D standard normal.
UnitQuaternion random_rotation(std::mt19937_64& rng);

PointCloud transform_cloud(std::span<const Eigen::Vector3d> cloud,
                           const RigidTransform& pose);

/// Drops the floor(fraction * n) points with the largest projection on
/// `direction`; among equal projections the higher index goes first. The
/// survivors keep their order.
PointCloud crop_half_space(std::span<const Eigen::Vector3d> cloud,
                           const Eigen::Vector3d& direction, double fraction);

/// Samples the model, then poses, perturbs and crops it. The model and the
/// scene draws use separate streams derived from `seed`. Throws ConfigError
/// unless crop_fraction lies in [0, 0.5] and noise_sigma >= 0.
Scene make_scene(const ShapeSpec& spec, std::uint64_t seed, double noise_sigma,
                 double crop_fraction);

/// The same for a given model cloud.
Scene make_scene(PointCloud model, std::uint64_t seed, double noise_sigma,
                 double crop_fraction);

/// A 64-bit seed mixed from a master seed and two stream labels.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

}  // namespace s3pose
