#include "s3pose/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "s3pose/errors.hpp"

namespace s3pose {

namespace {

void check_step(double h) {
  if (!(h > 1e-7 && h < 1e-2)) {
    throw std::invalid_argument("finite-difference step must lie in (1e-7, 1e-2)");
  }
}

double checked(double value) {
  if (!std::isfinite(value)) {
    throw NonFiniteObjective("objective returned a non-finite value");
  }
  return value;
}

}  // namespace

double softmin(std::span<const double> values, SoftMinConfig cfg) {
  if (values.empty()) throw std::invalid_argument("softmin of an empty set");
  const double lo = hardmin(values);
  double weight_sum = 0.0;
  double weighted = 0.0;
  for (double x : values) {
    const double w = std::exp(-cfg.beta * (x - lo));
    weight_sum += w;
    weighted += w * x;
  }
  // The minimum carries weight 1, so weight_sum >= 1.
  return std::max(lo, weighted / weight_sum);
}

double hardmin(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("minimum of an empty set");
  return *std::min_element(values.begin(), values.end());
}

double soft_distance(const UnitQuaternion& q, const EquivalentSet& eq,
                     SoftMinConfig cfg) {
  std::vector<double> d;
  d.reserve(eq.size());
  for (const auto& e : eq.quaternions) d.push_back(angular_distance(q, e));
  return softmin(d, cfg);
}

std::array<EquivalentSet, 3> canonical_rotational_sets(const UnitQuaternion& q_gt,
                                                       int n_eq) {
  return {equivalent_set_rotational(q_gt, Eigen::Vector3d::UnitX(), n_eq),
          equivalent_set_rotational(q_gt, Eigen::Vector3d::UnitY(), n_eq),
          equivalent_set_rotational(q_gt, Eigen::Vector3d::UnitZ(), n_eq)};
}

std::array<EquivalentSet, 3> canonical_mirror_sets(const UnitQuaternion& q_gt) {
  std::array<EquivalentSet, 3> sets;
  for (int k = 0; k < 3; ++k) {
    const Eigen::Vector3d normal = Eigen::Vector3d::Unit(k);
    sets[k] = equivalent_set_mirror(q_gt, std::span(&normal, 1));
  }
  return sets;
}

double warmup_loss(std::span<const UnitQuaternion> candidates,
                   const std::array<EquivalentSet, 3>& hypotheses,
                   SoftMinConfig cfg) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& set : hypotheses) {
    best = std::min(best, cand_rot_loss(candidates, set, cfg));
  }
  return best;
}

double warmup_rot_loss(std::span<const UnitQuaternion> candidates,
                       const UnitQuaternion& q_gt, int n_eq, SoftMinConfig cfg) {
  return warmup_loss(candidates, canonical_rotational_sets(q_gt, n_eq), cfg);
}

double cand_rot_loss(std::span<const UnitQuaternion> candidates,
                     const EquivalentSet& eq, SoftMinConfig cfg) {
  if (candidates.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& q : candidates) sum += soft_distance(q, eq, cfg);
  return sum / double(candidates.size());
}

double final_rot_loss(const UnitQuaternion& q_final, const EquivalentSet& eq,
                      SoftMinConfig cfg) {
  return soft_distance(q_final, eq, cfg);
}

double mean_mirror_consistency(std::span<const Eigen::Vector3d> cloud,
                               std::span<const Eigen::Vector3d> normals) {
  if (normals.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& u : normals) sum += mirror_consistency(cloud, u);
  return sum / double(normals.size());
}

MirrorLossTerms mirror_loss_terms(const UnitQuaternion& q_final,
                                  std::span<const UnitQuaternion> candidates,
                                  std::span<const Eigen::Vector3d> cloud,
                                  const UnitQuaternion& q_gt,
                                  const SymmetrySpec& spec, Stage stage,
                                  SoftMinConfig cfg) {
  MirrorLossTerms terms;
  if (stage == Stage::warmup) {
    const std::array<Eigen::Vector3d, 3> canonical{
        Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY(), Eigen::Vector3d::UnitZ()};
    terms.angle = warmup_loss(candidates, canonical_mirror_sets(q_gt), cfg);
    terms.geom = mean_mirror_consistency(cloud, canonical);
    return terms;
  }
  if (spec.plane_normals.empty()) {
    throw EmptyPlaneSet("main-stage mirror loss needs at least one plane");
  }
  const EquivalentSet eq = equivalent_set_mirror(q_gt, spec.plane_normals);
  terms.angle = cand_rot_loss(candidates, eq, cfg) + final_rot_loss(q_final, eq, cfg);
  terms.geom = mean_mirror_consistency(cloud, spec.plane_normals);
  return terms;
}

double mirror_loss(const UnitQuaternion& q_final,
                   std::span<const UnitQuaternion> candidates,
                   std::span<const Eigen::Vector3d> cloud,
                   const UnitQuaternion& q_gt, const SymmetrySpec& spec,
                   Stage stage, SoftMinConfig cfg) {
  return mirror_loss_terms(q_final, candidates, cloud, q_gt, spec, stage, cfg).total();
}

double asym_loss(const UnitQuaternion& q, const UnitQuaternion& q_gt) {
  return angular_distance(q, q_gt);
}

PoseGradient loss_gradient(const PoseObjective& objective, const PoseEstimate& at,
                           double h) {
  check_step(h);
  PoseGradient g;
  for (int k = 0; k < 3; ++k) {
    const TangentVector step(h * Eigen::Vector3d::Unit(k));
    const TangentVector back(-h * Eigen::Vector3d::Unit(k));
    PoseEstimate plus = at, minus = at;
    plus.rotation = compose(exp_map(step), at.rotation);
    minus.rotation = compose(exp_map(back), at.rotation);
    g.rotation[k] = (checked(objective(plus)) - checked(objective(minus))) / (2 * h);
  }
  for (int k = 0; k < 3; ++k) {
    PoseEstimate plus = at, minus = at;
    plus.translation[k] += h;
    minus.translation[k] -= h;
    g.translation[k] =
        (checked(objective(plus)) - checked(objective(minus))) / (2 * h);
  }
  return g;
}

Eigen::Vector3d rotation_gradient(const RotationObjective& objective,
                                  const UnitQuaternion& q, double h) {
  check_step(h);
  Eigen::Vector3d g;
  for (int k = 0; k < 3; ++k) {
    const UnitQuaternion plus = compose(exp_map(TangentVector(h * Eigen::Vector3d::Unit(k))), q);
    const UnitQuaternion minus = compose(exp_map(TangentVector(-h * Eigen::Vector3d::Unit(k))), q);
    g[k] = (checked(objective(plus)) - checked(objective(minus))) / (2 * h);
  }
  return g;
}

}  // namespace s3pose
