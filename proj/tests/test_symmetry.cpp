#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>
#include <random>

#include "clouds.hpp"
#include "oracles.hpp"
#include "s3pose/errors.hpp"
#include "s3pose/nearest_neighbor.hpp"
#include "s3pose/scene.hpp"
#include "s3pose/shapes.hpp"
#include "s3pose/symmetry.hpp"

using namespace s3pose;
using std::numbers::pi;

namespace {

const Eigen::Vector3d kX = Eigen::Vector3d::UnitX();
const Eigen::Vector3d kY = Eigen::Vector3d::UnitY();
const Eigen::Vector3d kZ = Eigen::Vector3d::UnitZ();

double angle_between_lines(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  return std::acos(std::min(1.0, std::abs(a.normalized().dot(b.normalized()))));
}

PointCloud posed(std::span<const Eigen::Vector3d> cloud, const UnitQuaternion& q) {
  return transform_cloud(cloud, RigidTransform{q, Eigen::Vector3d::Zero()});
}

// 99th percentile of the bidirectional Chamfer between independent samplings.
double sampling_tolerance(const ShapeSpec& spec) {
  std::vector<double> d;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto a = gen_shape(spec, 1000 + 2 * s);
    const auto b = gen_shape(spec, 1001 + 2 * s);
    d.push_back(chamfer_bidirectional(a, b));
  }
  std::sort(d.begin(), d.end());
  return d[98];
}

}  // namespace

TEST(SymmetryKind, ParseRoundTrip) {
  for (auto k : {SymmetryKind::rotational, SymmetryKind::mirror, SymmetryKind::asymmetric}) {
    EXPECT_EQ(parse_symmetry_kind(to_string(k)), k);
  }
  EXPECT_THROW(parse_symmetry_kind("helical"), ConfigError);
}

TEST(SynthAxis, Examples) {
  EXPECT_LT((synth_axis({1, 0, 0}) - kX).norm(), 1e-15);
  EXPECT_LT((synth_axis({0.5, 0.5, 0}) - Eigen::Vector3d(1, 1, 0).normalized()).norm(), 1e-15);
  EXPECT_LT((synth_axis(Eigen::Vector3d::Constant(1.0 / 3)) -
             Eigen::Vector3d::Ones().normalized()).norm(), 1e-15);
  EXPECT_THROW(synth_axis(Eigen::Vector3d::Zero()), DegenerateAxis);
}

TEST(OrthonormalTriple, Examples) {
  const auto a = orthonormal_triple(kX, kY);
  EXPECT_LT((a.n_prime - kY).norm(), 1e-15);
  EXPECT_LT((a.n_double_prime - kZ).norm(), 1e-15);
  const auto b = orthonormal_triple(kZ, {1, 0, 1});
  EXPECT_LT((b.n_prime - kX).norm(), 1e-15);
  EXPECT_LT((b.n_double_prime - kY).norm(), 1e-15);
  EXPECT_THROW(orthonormal_triple(kZ, {0, 0, 2}), ParallelInput);
  EXPECT_THROW(orthonormal_triple(kZ, {1e-6, 0, 1}), ParallelInput);
}

TEST(OrthonormalTriple, RandomGramIsIdentity) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    const auto n = oracle::random_unit(rng);
    const auto t = orthonormal_triple(n, oracle::random_unit(rng) * 3.0);
    Eigen::Matrix3d e;
    e << t.n, t.n_prime, t.n_double_prime;
    EXPECT_LT((e.transpose() * e - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_NEAR(e.determinant(), 1.0, 1e-9);
  }
}

TEST(EquivalentSetRotational, SizeMembershipAndAxis) {
  std::mt19937_64 rng(2);
  const auto q = oracle::random_quaternion(rng);
  EXPECT_EQ(equivalent_set_rotational(q, kZ, 36).size(), 36u);
  const auto single = equivalent_set_rotational(q, kZ, 1);
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single.quaternions[0].coeffs(), q.coeffs());

  for (int n_eq : {2, 7, 36, 360}) {
    const auto axis = oracle::random_unit(rng);
    const auto eq = equivalent_set_rotational(q, axis, n_eq);
    EXPECT_EQ(eq.quaternions[0].coeffs(), q.coeffs());
    EXPECT_EQ(eq.kind, SymmetryKind::rotational);
    for (int i = 0; i < n_eq; ++i) {
      // q_gt^-1 e is a rotation about the axis by 2 pi i / n_eq.
      const auto rel = compose(inverse(q), eq.quaternions[std::size_t(i)]);
      const double expected = 2 * pi * i / n_eq;
      EXPECT_NEAR(angular_distance(rel, UnitQuaternion::identity()),
                  std::min(expected, 2 * pi - expected), 1e-9);
      if (rel.vec().norm() > 1e-6) {
        EXPECT_LT(angle_between_lines(rel.vec(), axis), 1e-6);
      }
      for (int j = 0; j < i; ++j) {
        EXPECT_GT(angular_distance(eq.quaternions[std::size_t(i)],
                                   eq.quaternions[std::size_t(j)]), 1e-6);
      }
    }
  }
}

TEST(EquivalentSetRotational, CylinderPosesWithinSamplingTolerance) {
  const auto spec = ShapeSpec::defaults(ShapeKind::cylinder);
  const double tau = sampling_tolerance(spec);
  const auto model = gen_shape(spec, 7);
  std::mt19937_64 rng(3);
  const auto q = oracle::random_quaternion(rng);
  const auto ref = posed(model, q);
  for (const auto& e : equivalent_set_rotational(q, kZ, 36).quaternions) {
    EXPECT_LE(chamfer_bidirectional(posed(model, e), ref), tau);
  }
}

TEST(EquivalentSetMirror, Generators) {
  std::mt19937_64 rng(4);
  const auto q = oracle::random_quaternion(rng);
  EXPECT_EQ(equivalent_set_mirror(q, {}).size(), 1u);
  const std::vector<Eigen::Vector3d> z{kZ};
  const auto one = equivalent_set_mirror(q, z);
  ASSERT_EQ(one.size(), 2u);
  EXPECT_EQ(one.quaternions[0].coeffs(), q.coeffs());
  EXPECT_LT(angular_distance(one.quaternions[1], compose(q, normalize({0, 0, 0, 1}))), 1e-12);

  // Three orthogonal half-turns close into the four-element Klein group.
  const std::vector<Eigen::Vector3d> xyz{kX, kY, kZ};
  EXPECT_EQ(equivalent_set_mirror(q, xyz).size(), 4u);
  const std::vector<Eigen::Vector3d> xy{kX, kY};
  EXPECT_EQ(equivalent_set_mirror(q, xy).size(), 4u);
  // Half-turns 45 degrees apart generate a dihedral group of order 8.
  const std::vector<Eigen::Vector3d> skew{kX, Eigen::Vector3d(1, 1, 0).normalized()};
  EXPECT_EQ(equivalent_set_mirror(q, skew).size(), 8u);
  // An irrational angle never closes; the closure stops at the cap.
  const std::vector<Eigen::Vector3d> open{kX, Eigen::Vector3d(1, std::sqrt(2.0), 0).normalized()};
  EXPECT_EQ(equivalent_set_mirror(q, open).size(), 64u);
}

TEST(EquivalentSetMirror, BoxPosesWithinSamplingTolerance) {
  const auto spec = ShapeSpec::defaults(ShapeKind::box);
  const double tau = sampling_tolerance(spec);
  const auto model = gen_shape(spec, 8);
  std::mt19937_64 rng(5);
  const auto q = oracle::random_quaternion(rng);
  const auto ref = posed(model, q);
  for (const auto& e : equivalent_set_mirror(q, spec.true_symmetry.plane_normals).quaternions) {
    EXPECT_LE(chamfer_bidirectional(posed(model, e), ref), tau);
  }
}

TEST(ReflectCloud, FixedPointInvolutionAndGridSet) {
  PointCloud tri{{0, 0, 0}, {1, 0, 0}, {0.5, 0.9, 0}};
  tri.push_back(centroid(tri));
  const auto r = reflect_cloud(tri, Eigen::Vector3d(0.3, -0.4, 0.5).normalized());
  EXPECT_LT((r[3] - tri[3]).norm(), 1e-15);

  std::mt19937_64 rng(6);
  std::normal_distribution<double> g;
  PointCloud p;
  for (int i = 0; i < 500; ++i) p.emplace_back(g(rng), g(rng), g(rng));
  for (int t = 0; t < 20; ++t) {
    const auto u = oracle::random_unit(rng);
    const auto twice = reflect_cloud(reflect_cloud(p, u), u);
    for (std::size_t i = 0; i < p.size(); ++i) EXPECT_LT((twice[i] - p[i]).norm(), 1e-12);
  }

  const auto cube = clouds::grid_cube(11, 1.0);
  const auto mirrored = reflect_cloud(cube, kX);
  // Set equality: every reflected point has an exact partner.
  EXPECT_LT(oracle::brute_chamfer(mirrored, cube), 1e-9);
  EXPECT_LT(oracle::brute_chamfer(cube, mirrored), 1e-9);
}

TEST(Chamfer, Basics) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  PointCloud p;
  for (int i = 0; i < 3000; ++i) p.emplace_back(g(rng), g(rng), g(rng));
  EXPECT_EQ(chamfer_one_sided(p, p), 0.0);
  const PointCloud a{{0, 0, 0}};
  const PointCloud b{{1, 0, 0}};
  EXPECT_EQ(chamfer_one_sided(a, b), 1.0);
}

TEST(Chamfer, MatchesBruteForce) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int n : {1, 2, 64, 255, 256, 257, 1024, 2000}) {
    PointCloud a;
    PointCloud b;
    for (int i = 0; i < n; ++i) a.emplace_back(u(rng), u(rng), u(rng));
    // Anisotropic, clustered second set to stress the grid.
    for (int i = 0; i < n + 17; ++i) {
      b.emplace_back(0.1 * u(rng), 3 * u(rng), 0.01 * std::round(10 * u(rng)));
    }
    EXPECT_NEAR(chamfer_one_sided(a, b), oracle::brute_chamfer(a, b), 1e-12) << n;
    EXPECT_NEAR(chamfer_one_sided(b, a), oracle::brute_chamfer(b, a), 1e-12) << n;
    EXPECT_NEAR(chamfer_bidirectional(a, b),
                0.5 * (oracle::brute_chamfer(a, b) + oracle::brute_chamfer(b, a)), 1e-12);
  }
}

TEST(Chamfer, QueriesFarOutsideTheGrid) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1, 1);
  PointCloud b;
  for (int i = 0; i < 1000; ++i) b.emplace_back(u(rng), u(rng), u(rng));
  const NearestNeighborIndex index(b);
  for (int i = 0; i < 200; ++i) {
    const Eigen::Vector3d q = oracle::random_unit(rng) * (2.0 + 50.0 * (u(rng) + 1));
    const PointCloud one{q};
    EXPECT_NEAR(index.nearest_distance(q), oracle::brute_chamfer(one, b), 1e-12);
  }
}

TEST(MirrorConsistency, GridCubeAndNonNegativity) {
  const auto cube = clouds::grid_cube(11, 0.1);
  for (const auto& u : {kX, kY, kZ}) EXPECT_LE(mirror_consistency(cube, u), 1e-9);
  std::mt19937_64 rng(10);
  for (int i = 0; i < 20; ++i) {
    EXPECT_GE(mirror_consistency(cube, oracle::random_unit(rng)), 0.0);
  }
}

TEST(MirrorConsistency, LBracketNearPlaneIsLowest) {
  const auto bracket = gen_shape(ShapeSpec::defaults(ShapeKind::l_bracket), 3);
  const double lx = mirror_consistency(bracket, kX);
  const double ly = mirror_consistency(bracket, kY);
  const double lz = mirror_consistency(bracket, kZ);
  EXPECT_LT(lz, lx);
  EXPECT_LT(lz, ly);
  EXPECT_GT(lz, 0.0);
}

TEST(PlaneScores, Formula) {
  const auto equal = plane_scores_from_consistency({0.2, 0.2, 0.2});
  for (double s : equal) EXPECT_NEAR(s, 1.0 / 3, 1e-6);
  const double eps = 1e-8;
  const std::array<double, 3> huge{1e6, 2e6, 5e6};
  const auto s = plane_scores_from_consistency(huge, eps);
  double denom = eps;
  for (double l : huge) denom += 1.0 / (l + eps);
  for (int j = 0; j < 3; ++j) {
    EXPECT_NEAR(s[std::size_t(j)], (1.0 / (huge[std::size_t(j)] + eps)) / denom, 1e-15);
  }
  const auto zero = plane_scores_from_consistency({0.0, 0.0, 0.0});
  double sum = 0;
  for (double v : zero) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    sum += v;
  }
  EXPECT_LE(sum, 1.0);
}

TEST(PlaneScores, TruePlaneWinsOnBox) {
  const auto box = gen_shape(ShapeSpec::defaults(ShapeKind::box), 4);
  const Eigen::Vector3d bad1 = Eigen::Vector3d(1, 1, 0).normalized();
  const Eigen::Vector3d bad2 = Eigen::Vector3d(1, -1, 1).normalized();
  const auto s = plane_scores(box, {bad1, kZ, bad2});
  EXPECT_GT(s[1], s[0]);
  EXPECT_GT(s[1], s[2]);
}

TEST(PlaneScores, BoundsOnRandomClouds) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int t = 0; t < 20; ++t) {
    PointCloud p;
    for (int i = 0; i < 100; ++i) p.emplace_back(g(rng), g(rng), g(rng));
    const auto s = plane_scores(p, {oracle::random_unit(rng), oracle::random_unit(rng),
                                    oracle::random_unit(rng)});
    EXPECT_LE(s[0] + s[1] + s[2], 1.0);
    for (double v : s) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(EstimateRotationalAxis, Cylinder) {
  const auto cyl = gen_shape(ShapeSpec::defaults(ShapeKind::cylinder), 5);
  const auto est = estimate_rotational_axis(cyl);
  EXPECT_GT(est.distribution.z(), 0.9);
  EXPECT_LT(angle_between_lines(est.axis, kZ), 5.0 * pi / 180);
  EXPECT_NEAR(est.distribution.sum(), 1.0, 1e-9);
}

TEST(EstimateRotationalAxis, SphereHasNoDominantAxis) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto est = estimate_rotational_axis(clouds::sphere(1024, 0.1, seed));
    EXPECT_LT(est.distribution.maxCoeff(), 0.6) << est.distribution.transpose();
  }
}

TEST(EstimateRotationalAxis, RelabelingPermutesDistribution) {
  const auto cyl = gen_shape(ShapeSpec::defaults(ShapeKind::cone), 6);
  const auto est = estimate_rotational_axis(cyl);
  // (x, y, z) -> (z, x, y): the symmetry axis moves from z to x.
  PointCloud perm;
  for (const auto& p : cyl) perm.emplace_back(p.z(), p.x(), p.y());
  const auto est_perm = estimate_rotational_axis(perm);
  EXPECT_NEAR(est_perm.distribution.x(), est.distribution.z(), 1e-9);
  EXPECT_NEAR(est_perm.distribution.y(), est.distribution.x(), 1e-9);
  EXPECT_NEAR(est_perm.distribution.z(), est.distribution.y(), 1e-9);
  EXPECT_GT(est_perm.distribution.x(), 0.9);
}

TEST(EstimateMirrorPlanes, ClosedBoxKeepsThreePlanes) {
  const auto spec = ShapeSpec::defaults(ShapeKind::box);
  const auto est = estimate_mirror_planes(gen_shape(spec, 7));
  ASSERT_EQ(est.spec.plane_normals.size(), 3u);
  for (const auto& n : est.spec.plane_normals) {
    const double best = std::min({angle_between_lines(n, kX), angle_between_lines(n, kY),
                                  angle_between_lines(n, kZ)});
    EXPECT_LT(best, 10.0 * pi / 180);
  }
}

TEST(EstimateMirrorPlanes, OpenTrayKeepsTwoPlanes) {
  const auto est = estimate_mirror_planes(clouds::open_tray(0.2, 0.3, 0.1, 1024, 8));
  ASSERT_EQ(est.spec.plane_normals.size(), 2u) << est.scores[0] << " " << est.scores[1]
                                               << " " << est.scores[2];
  std::vector<bool> found(2, false);
  for (const auto& n : est.spec.plane_normals) {
    if (angle_between_lines(n, kX) < 10.0 * pi / 180) found[0] = true;
    if (angle_between_lines(n, kY) < 10.0 * pi / 180) found[1] = true;
  }
  EXPECT_TRUE(found[0] && found[1]);
}

TEST(EstimateMirrorPlanes, CubeAxisAligned) {
  const auto est = estimate_mirror_planes(clouds::grid_cube(11, 0.1));
  EXPECT_GE(est.spec.plane_normals.size(), 1u);
  EXPECT_LE(est.spec.plane_normals.size(), 3u);
  for (const auto& n : est.spec.plane_normals) {
    const double best = std::min({angle_between_lines(n, kX), angle_between_lines(n, kY),
                                  angle_between_lines(n, kZ)});
    EXPECT_LT(best, 10.0 * pi / 180);
  }
}

TEST(EstimateMirrorPlanes, LBracketScoresAndThreshold) {
  const auto bracket = gen_shape(ShapeSpec::defaults(ShapeKind::l_bracket), 9);
  const auto est = evaluate_mirror_planes(bracket);
  const auto expected = plane_scores(bracket, est.candidates);
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(est.scores[std::size_t(j)], expected[std::size_t(j)], 1e-12);
  std::size_t kept = 0;
  for (double s : est.scores) kept += s >= 0.25;
  EXPECT_EQ(est.spec.plane_normals.size(), kept);
  // No plane reaches a threshold above every score.
  const double top = *std::max_element(est.scores.begin(), est.scores.end());
  EXPECT_THROW(estimate_mirror_planes(bracket, top + 1e-3), NoPlaneRetained);
  EXPECT_TRUE(evaluate_mirror_planes(bracket, top + 1e-3).spec.plane_normals.empty());
}
