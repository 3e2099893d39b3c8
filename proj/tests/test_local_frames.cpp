#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "s3pose/errors.hpp"
#include "s3pose/local_frames.hpp"

using namespace s3pose;

namespace {

void expect_rotation(const LocalFrame& f, double tol) {
  const Eigen::Matrix3d e = f.matrix();
  EXPECT_LT((e.transpose() * e - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), tol);
  EXPECT_NEAR(e.determinant(), 1.0, tol);
}

PointCloud anisotropic_blob(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  PointCloud p;
  for (int i = 0; i < n; ++i) p.emplace_back(3.0 * g(rng), 1.2 * g(rng), 0.4 * g(rng));
  return p;
}

}  // namespace

TEST(Knn, SmallCases) {
  const PointCloud line{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
  const auto nb = knn(line, 1, 2);
  EXPECT_EQ(nb.center_index, 1u);
  EXPECT_EQ(nb.neighbor_indices, (std::vector<std::size_t>{0, 2}));  // tie -> lower index
  EXPECT_LT((nb.directions[0] - Eigen::Vector3d(-1, 0, 0)).norm(), 1e-15);
  const auto all = knn(line, 0, 10);
  EXPECT_EQ(all.neighbor_indices, (std::vector<std::size_t>{1, 2}));
  EXPECT_THROW(knn(line, 0, 0), std::invalid_argument);
  EXPECT_THROW(knn(PointCloud{{0, 0, 0}}, 0, 1), std::invalid_argument);
}

TEST(Knn, MatchesExhaustiveSort) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  PointCloud p;
  for (int i = 0; i < 100; ++i) p.emplace_back(u(rng), u(rng), u(rng));
  for (std::size_t i = 0; i < p.size(); ++i) {
    std::vector<std::size_t> order;
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (j != i) order.push_back(j);
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return (p[a] - p[i]).squaredNorm() < (p[b] - p[i]).squaredNorm();
    });
    order.resize(8);
    const auto nb = knn(p, i, 8);
    EXPECT_EQ(nb.neighbor_indices, order);
    for (std::size_t k : nb.neighbor_indices) EXPECT_NE(k, i);
  }
}

TEST(Knn, IndependentOfInputOrder) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  PointCloud p;
  for (int i = 0; i < 60; ++i) p.emplace_back(u(rng), u(rng), u(rng));
  std::vector<std::size_t> perm(p.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  PointCloud q(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) q[i] = p[perm[i]];
  for (std::size_t i = 0; i < q.size(); ++i) {
    const auto a = knn(q, i, 6);
    const auto b = knn(p, perm[i], 6);
    for (std::size_t k = 0; k < 6; ++k) {
      EXPECT_EQ(perm[a.neighbor_indices[k]], b.neighbor_indices[k]);
    }
  }
}

TEST(Covariance, Cases) {
  const Eigen::Vector3d d(0.3, -0.2, 0.7);
  Neighborhood pm{0, {1, 2}, {d, -d}};
  EXPECT_LT((covariance(pm) - d * d.transpose()).cwiseAbs().maxCoeff(), 1e-15);

  Neighborhood along_x{0, {1, 2, 3}, {{1, 0, 0}, {-2, 0, 0}, {0.5, 0, 0}}};
  const Eigen::Matrix3d s = covariance(along_x);
  EXPECT_NEAR(s(0, 0), (1 + 4 + 0.25) / 3.0, 1e-15);
  EXPECT_EQ((s.bottomRightCorner<2, 2>().norm()), 0.0);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int t = 0; t < 100; ++t) {
    Neighborhood nb;
    for (int k = 0; k < 8; ++k) nb.directions.emplace_back(g(rng), g(rng), g(rng));
    Eigen::Matrix3d ref = Eigen::Matrix3d::Zero();
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        for (const auto& r : nb.directions) ref(a, b) += r[a] * r[b];
        ref(a, b) /= 8.0;
      }
    }
    const Eigen::Matrix3d got = covariance(nb);
    EXPECT_LT((got - ref).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(got, got.transpose());
    EXPECT_GE(oracle::analytic_eig(got).values[2], -1e-12);
  }
}

TEST(PrincipalDirection, ClosedForms) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    const Eigen::Vector3d v0 = oracle::random_unit(rng);
    const auto v = principal_direction(Eigen::Matrix3d::Identity(), v0);
    EXPECT_LT((v - oracle::canonical_sign(v0)).norm(), 1e-15);
  }
  const Eigen::Matrix3d s = Eigen::Vector3d(3, 1, 0.1).asDiagonal();
  EXPECT_LT((principal_direction(s) - Eigen::Vector3d(3, 1, 0.1).normalized()).norm(), 1e-15);
  EXPECT_LT((principal_direction(s, default_start_vector(), 50) - Eigen::Vector3d::UnitX()).norm(),
            1e-6);
  EXPECT_THROW(principal_direction(Eigen::Matrix3d::Zero()), DegenerateCovariance);
  const Eigen::Matrix3d xx = Eigen::Vector3d(1, 0, 0).asDiagonal();
  EXPECT_THROW(principal_direction(xx, Eigen::Vector3d::UnitY()), DegenerateCovariance);
}

TEST(PrincipalDirection, ConvergesToOracleEigenvector) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  int checked = 0;
  for (int t = 0; t < 200; ++t) {
    Eigen::Matrix3d a;
    for (int i = 0; i < 9; ++i) a(i) = g(rng);
    const Eigen::Matrix3d s = a * a.transpose();
    const auto ref = oracle::analytic_eig(s);
    if (ref.values[0] < 1.5 * ref.values[1]) continue;
    ++checked;
    const auto v = principal_direction(s, default_start_vector(), 200);
    EXPECT_LT((v - oracle::canonical_sign(ref.vectors[0])).norm(), 1e-8);
  }
  EXPECT_GT(checked, 50);
}

TEST(BuildFrame, HandCrossProducts) {
  const auto fx = build_frame(Eigen::Vector3d::UnitX());
  EXPECT_EQ(fx.e2, Eigen::Vector3d(0, 0, 1));
  EXPECT_EQ(fx.e3, Eigen::Vector3d(0, -1, 0));
  expect_rotation(fx, 1e-15);
  const auto fz = build_frame(Eigen::Vector3d::UnitZ());
  EXPECT_EQ(fz.e2, Eigen::Vector3d(0, 1, 0));
  EXPECT_EQ(fz.e3, Eigen::Vector3d(-1, 0, 0));
  expect_rotation(fz, 1e-15);
}

TEST(BuildFrame, OrthonormalSweepIncludingFallback) {
  std::mt19937_64 rng(6);
  int fallback = 0;
  for (int t = 0; t < 10000; ++t) {
    Eigen::Vector3d e1 = oracle::random_unit(rng);
    if (t % 10 == 0) {
      // Force the neighborhood of +-x, where the fallback reference is used.
      e1 = (Eigen::Vector3d(t % 20 ? 1 : -1, 0, 0) + 0.1 * oracle::random_unit(rng)).normalized();
    }
    if (std::abs(e1.x()) > 0.99) ++fallback;
    const auto f = build_frame(e1 * (1.0 + 5e-7));
    expect_rotation(f, 1e-9);
    EXPECT_LT((f.e1 - e1).norm(), 1e-12);
  }
  EXPECT_GT(fallback, 100);
}

TEST(ProjectLocal, BasisAndNorms) {
  std::mt19937_64 rng(7);
  const std::vector<Eigen::Vector3d> d{{0.1, 0.2, 0.3}, {-1, 0, 2}};
  const auto same = project_local(LocalFrame{}, d);
  EXPECT_EQ(same[0], d[0]);
  EXPECT_EQ(same[1], d[1]);
  for (int t = 0; t < 1000; ++t) {
    const auto f = build_frame(oracle::random_unit(rng));
    const std::vector<Eigen::Vector3d> e1{f.e1};
    EXPECT_LT((project_local(f, e1)[0] - Eigen::Vector3d::UnitX()).norm(), 1e-12);
    const std::vector<Eigen::Vector3d> r{oracle::random_unit(rng) * 3.0};
    EXPECT_NEAR(project_local(f, r)[0].norm(), r[0].norm(), 1e-12);
  }
}

// What the fixed reference vector does preserve under a global rotation: the
// component along e1 up to sign, and the length of the in-plane remainder.
TEST(ProjectLocal, ConvergedFramesPreserveAxialComponentUnderRotation) {
  const auto cloud = anisotropic_blob(300, 8);
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const auto q = oracle::random_quaternion(rng);
    const Eigen::Matrix3d r = oracle::rotation_matrix(q);
    PointCloud rotated;
    for (const auto& p : cloud) rotated.push_back(r * p);
    for (std::size_t i = 0; i < cloud.size(); i += 37) {
      const auto nb = knn(cloud, i, 8);
      const Eigen::Matrix3d s = covariance(nb);
      const auto ev = oracle::analytic_eig(s);
      if (ev.values[0] < 1.5 * ev.values[1]) continue;
      const auto nb_r = knn(rotated, i, 8);
      const auto f = build_frame(principal_direction(s, default_start_vector(), 50));
      const auto f_r = build_frame(principal_direction(covariance(nb_r), default_start_vector(), 50));
      const auto a = project_local(f, nb.directions);
      const auto b = project_local(f_r, nb_r.directions);
      for (std::size_t k = 0; k < a.size(); ++k) {
        EXPECT_NEAR(std::abs(a[k].x()), std::abs(b[k].x()), 1e-4);
        EXPECT_NEAR(a[k].tail<2>().norm(), b[k].tail<2>().norm(), 1e-4);
      }
    }
  }
}

TEST(FrameFeatures, Cases) {
  const auto iso = frame_features(Eigen::Matrix3d::Identity());
  EXPECT_EQ(iso.trace, 3.0);
  EXPECT_NEAR(iso.anisotropy, 0.0, 1e-30);
  const Eigen::Matrix3d one = Eigen::Vector3d(1, 0, 0).asDiagonal();
  const auto f = frame_features(one);
  EXPECT_EQ(f.trace, 1.0);
  EXPECT_NEAR(f.anisotropy, 2.0 / 3.0, 1e-15);

  std::mt19937_64 rng(10);
  std::normal_distribution<double> g;
  for (int t = 0; t < 100; ++t) {
    Eigen::Matrix3d a;
    for (int i = 0; i < 9; ++i) a(i) = g(rng);
    const Eigen::Matrix3d s = a + a.transpose();
    const double tr = s(0, 0) + s(1, 1) + s(2, 2);
    double an = 0.0;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const double v = s(i, j) - (i == j ? tr / 3.0 : 0.0);
        an += v * v;
      }
    }
    const auto got = frame_features(s);
    EXPECT_NEAR(got.trace, tr, 1e-12);
    EXPECT_NEAR(got.anisotropy, an, 1e-12);
    EXPECT_GT(got.anisotropy, 0.0);
    EXPECT_NEAR(frame_features(2.5 * Eigen::Matrix3d::Identity()).anisotropy, 0.0, 1e-12);
  }
}

TEST(CloudFrames, DefaultCloudSize) {
  const auto cloud = anisotropic_blob(1024, 11);
  const auto frames = cloud_frames(cloud, 8);
  ASSERT_EQ(frames.size(), 1024u);
  for (const auto& f : frames) {
    ASSERT_TRUE(f.frame.has_value());
    expect_rotation(*f.frame, 1e-9);
  }
  EXPECT_THROW(cloud_frames(PointCloud(8, Eigen::Vector3d::Zero()), 8), std::invalid_argument);
}

TEST(CloudFrames, PlaneWithNormalAlongReference) {
  // With reference t = x, e3 = (e1 (e1 . x) - x) / |e1 x x|, which is the
  // normal exactly when the plane contains e1 and is orthogonal to x.
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1, 1);
  PointCloud plane;
  for (int i = 0; i < 400; ++i) plane.emplace_back(0.25, 2.0 * u(rng), 0.7 * u(rng));
  for (const auto& f : cloud_frames(plane, 8, 50)) {
    ASSERT_TRUE(f.frame.has_value());
    EXPECT_GT(std::abs(f.frame->e3.x()), std::cos(5.0 * std::numbers::pi / 180));
  }
}

TEST(CloudFrames, RepeatedPointsAreFlagged) {
  PointCloud p(12, Eigen::Vector3d(0.1, 0.2, 0.3));
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 30; ++i) p.emplace_back(u(rng), u(rng), u(rng));
  const auto frames = cloud_frames(p, 8);
  ASSERT_EQ(frames.size(), p.size());
  for (int i = 0; i < 12; ++i) EXPECT_FALSE(frames[std::size_t(i)].frame.has_value());
  for (std::size_t i = 12; i < p.size(); ++i) EXPECT_TRUE(frames[i].frame.has_value());
}
