#include "s3pose/scene.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "s3pose/errors.hpp"

namespace s3pose {

UnitQuaternion random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  for (;;) {
    Eigen::Vector4d v(normal(rng), normal(rng), normal(rng), normal(rng));
    if (v.norm() > 1e-6) return normalize(v);
  }
}

PointCloud transform_cloud(std::span<const Eigen::Vector3d> cloud,
                           const RigidTransform& pose) {
  PointCloud out;
  out.reserve(cloud.size());
  for (const auto& p : cloud) out.push_back(pose.apply(p));
  return out;
}

PointCloud crop_half_space(std::span<const Eigen::Vector3d> cloud,
                           const Eigen::Vector3d& direction, double fraction) {
  const auto n = cloud.size();
  const auto drop = std::size_t(std::floor(fraction * double(n)));
  if (drop == 0) return PointCloud(cloud.begin(), cloud.end());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> proj(n);
  for (std::size_t i = 0; i < n; ++i) proj[i] = cloud[i].dot(direction);
  std::nth_element(order.begin(), order.begin() + std::ptrdiff_t(drop), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return proj[a] != proj[b] ? proj[a] > proj[b] : a > b;
                   });
  std::vector<bool> removed(n, false);
  for (std::size_t i = 0; i < drop; ++i) removed[order[i]] = true;
  PointCloud out;
  out.reserve(n - drop);
  for (std::size_t i = 0; i < n; ++i) {
    if (!removed[i]) out.push_back(cloud[i]);
  }
  return out;
}

Scene make_scene(PointCloud model, std::uint64_t seed, double noise_sigma,
                 double crop_fraction) {
  if (!(crop_fraction >= 0.0 && crop_fraction <= 0.5)) {
    throw ConfigError("crop fraction must lie in [0, 0.5]", 0, "crop");
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw ConfigError("noise sigma must be finite and non-negative", 0, "sigma");
  }
  std::mt19937_64 rng(derive_seed(seed, 1));
  Scene scene;
  scene.noise_sigma = noise_sigma;
  scene.crop_fraction = crop_fraction;
  scene.gt.rotation = random_rotation(rng);
  std::uniform_real_distribution<double> uniform(-0.5, 0.5);
  for (int d = 0; d < 3; ++d) scene.gt.translation[d] = uniform(rng);

  PointCloud posed = transform_cloud(model, scene.gt);
  if (noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, noise_sigma);
    for (auto& p : posed) {
      for (int d = 0; d < 3; ++d) p[d] += noise(rng);
    }
  }
  std::normal_distribution<double> normal;
  Eigen::Vector3d dir;
  do {
    dir = Eigen::Vector3d(normal(rng), normal(rng), normal(rng));
  } while (dir.norm() < 1e-6);
  scene.observed = crop_half_space(posed, dir.normalized(), crop_fraction);
  scene.model = std::move(model);
  return scene;
}

Scene make_scene(const ShapeSpec& spec, std::uint64_t seed, double noise_sigma,
                 double crop_fraction) {
  return make_scene(gen_shape(spec, derive_seed(seed, 0)), seed, noise_sigma,
                    crop_fraction);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  std::seed_seq seq{std::uint32_t(master), std::uint32_t(master >> 32),
                    std::uint32_t(a),      std::uint32_t(a >> 32),
                    std::uint32_t(b),      std::uint32_t(b >> 32)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (std::uint64_t(out[0]) << 32) | out[1];
}

}  // namespace s3pose
