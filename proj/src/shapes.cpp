#include "s3pose/shapes.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <variant>

#include "s3pose/errors.hpp"

namespace s3pose {

namespace {

constexpr double kPi = std::numbers::pi;

struct Rect {
  Eigen::Vector3d origin, e1, e2;
};
// Horizontal annulus (or disk when inner == 0) at height z.
struct Annulus {
  double z, inner, outer;
};
struct CylinderSide {
  double z0, z1, radius;
};
// Lateral cone surface from a base circle at z_base to the apex at z_apex.
struct ConeSide {
  double z_base, z_apex, radius;
};

using Patch = std::variant<Rect, Annulus, CylinderSide, ConeSide>;

double area(const Patch& patch) {
  struct {
    double operator()(const Rect& r) const { return r.e1.cross(r.e2).norm(); }
    double operator()(const Annulus& a) const {
      return kPi * (a.outer * a.outer - a.inner * a.inner);
    }
    double operator()(const CylinderSide& c) const {
      return 2.0 * kPi * c.radius * (c.z1 - c.z0);
    }
    double operator()(const ConeSide& c) const {
      const double h = c.z_apex - c.z_base;
      return kPi * c.radius * std::sqrt(c.radius * c.radius + h * h);
    }
  } visitor;
  return std::visit(visitor, patch);
}

Eigen::Vector3d sample(const Patch& patch, double u, double v) {
  struct {
    double u, v;
    Eigen::Vector3d operator()(const Rect& r) const {
      return r.origin + u * r.e1 + v * r.e2;
    }
    Eigen::Vector3d operator()(const Annulus& a) const {
      const double r = std::sqrt(a.inner * a.inner +
                                 u * (a.outer * a.outer - a.inner * a.inner));
      const double phi = 2.0 * kPi * v;
      return {r * std::cos(phi), r * std::sin(phi), a.z};
    }
    Eigen::Vector3d operator()(const CylinderSide& c) const {
      const double phi = 2.0 * kPi * v;
      return {c.radius * std::cos(phi), c.radius * std::sin(phi),
              c.z0 + u * (c.z1 - c.z0)};
    }
    Eigen::Vector3d operator()(const ConeSide& c) const {
      // Area grows linearly with distance from the apex.
      const double rho = std::sqrt(u);
      const double phi = 2.0 * kPi * v;
      return {rho * c.radius * std::cos(phi), rho * c.radius * std::sin(phi),
              c.z_apex - rho * (c.z_apex - c.z_base)};
    }
  } visitor{u, v};
  return std::visit(visitor, patch);
}

void add_box(std::vector<Patch>& patches, const Eigen::Vector3d& lo,
             const Eigen::Vector3d& size) {
  const Eigen::Vector3d ex(size.x(), 0, 0), ey(0, size.y(), 0), ez(0, 0, size.z());
  patches.push_back(Rect{lo, ex, ey});
  patches.push_back(Rect{lo + ez, ex, ey});
  patches.push_back(Rect{lo, ey, ez});
  patches.push_back(Rect{lo + ex, ey, ez});
  patches.push_back(Rect{lo, ez, ex});
  patches.push_back(Rect{lo + ey, ez, ex});
}

std::vector<Patch> build_patches(const ShapeSpec& spec) {
  const auto& d = spec.dimensions;
  const auto need = [&](std::size_t count) {
    if (d.size() != count) {
      throw ConfigError(std::string(to_string(spec.kind)) + " expects " +
                            std::to_string(count) + " dimensions",
                        0, "dimensions");
    }
    for (double v : d) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw ConfigError("shape dimensions must be positive", 0, "dimensions");
      }
    }
  };

  std::vector<Patch> patches;
  switch (spec.kind) {
    case ShapeKind::cylinder: {
      need(2);
      const double r = d[0], h = d[1];
      patches.push_back(CylinderSide{-h / 2, h / 2, r});
      patches.push_back(Annulus{-h / 2, 0.0, r});
      patches.push_back(Annulus{h / 2, 0.0, r});
      break;
    }
    case ShapeKind::cone: {
      need(2);
      const double r = d[0], h = d[1];
      patches.push_back(ConeSide{-h / 2, h / 2, r});
      patches.push_back(Annulus{-h / 2, 0.0, r});
      break;
    }
    case ShapeKind::box: {
      need(3);
      const Eigen::Vector3d size(d[0], d[1], d[2]);
      add_box(patches, -size / 2, size);
      break;
    }
    case ShapeKind::cube: {
      need(1);
      const Eigen::Vector3d size = Eigen::Vector3d::Constant(d[0]);
      add_box(patches, -size / 2, size);
      break;
    }
    case ShapeKind::l_bracket: {
      need(3);
      const double a = d[0], b = d[1], w = d[2];
      const double t = std::min(a, b) / 8.0;
      const double w2 = 2.0 * w / 3.0;
      const Eigen::Vector3d shift(-a / 2, -b / 2, -w / 2);
      const auto rect = [&](Eigen::Vector3d o, Eigen::Vector3d e1, Eigen::Vector3d e2) {
        patches.push_back(Rect{o + shift, e1, e2});
      };
      const Eigen::Vector3d X(1, 0, 0), Y(0, 1, 0), Z(0, 0, 1);
      // Foot [0,a] x [0,t] x [0,w].
      rect({0, 0, 0}, a * X, w * Z);             // y = 0
      rect({t, t, 0}, (a - t) * X, w * Z);       // y = t, right of the leg
      rect({0, t, w2}, t * X, (w - w2) * Z);     // y = t, beyond the leg
      rect({0, 0, 0}, t * Y, w * Z);             // x = 0
      rect({a, 0, 0}, t * Y, w * Z);             // x = a
      rect({0, 0, 0}, a * X, t * Y);             // z = 0
      rect({0, 0, w}, a * X, t * Y);             // z = w
      // Leg [0,t] x [t,b] x [0,w2].
      rect({0, b, 0}, t * X, w2 * Z);            // y = b
      rect({0, t, 0}, (b - t) * Y, w2 * Z);      // x = 0
      rect({t, t, 0}, (b - t) * Y, w2 * Z);      // x = t
      rect({0, t, 0}, t * X, (b - t) * Y);       // z = 0
      rect({0, t, w2}, t * X, (b - t) * Y);      // z = w2
      break;
    }
    case ShapeKind::knob: {
      need(3);
      const double r1 = d[0], h1 = d[1], h2 = d[2];
      const double r2 = r1 / 3.0;
      const double z0 = -(h1 + h2) / 2, z1 = z0 + h1, z2 = z1 + h2;
      patches.push_back(Annulus{z0, 0.0, r1});
      patches.push_back(CylinderSide{z0, z1, r1});
      patches.push_back(Annulus{z1, r2, r1});
      patches.push_back(CylinderSide{z1, z2, r2});
      patches.push_back(Annulus{z2, 0.0, r2});
      break;
    }
  }
  return patches;
}

}  // namespace

std::string_view to_string(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::cylinder: return "cylinder";
    case ShapeKind::cone: return "cone";
    case ShapeKind::box: return "box";
    case ShapeKind::cube: return "cube";
    case ShapeKind::l_bracket: return "l_bracket";
    case ShapeKind::knob: return "knob";
  }
  return "cylinder";
}

ShapeKind parse_shape_kind(std::string_view name) {
  for (ShapeKind k : {ShapeKind::cylinder, ShapeKind::cone, ShapeKind::box,
                      ShapeKind::cube, ShapeKind::l_bracket, ShapeKind::knob}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown shape '" + std::string(name) + "'", 0, "shape");
}

SymmetrySpec symmetry_of(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::cylinder:
    case ShapeKind::cone:
    case ShapeKind::knob:
      return SymmetrySpec::rotational(Eigen::Vector3d::UnitZ());
    case ShapeKind::box:
    case ShapeKind::cube:
      return SymmetrySpec::mirror({Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY(),
                                   Eigen::Vector3d::UnitZ()});
    case ShapeKind::l_bracket:
      return SymmetrySpec::asymmetric();
  }
  return SymmetrySpec::asymmetric();
}

ShapeSpec ShapeSpec::defaults(ShapeKind kind, int sample_count) {
  ShapeSpec spec;
  spec.kind = kind;
  spec.sample_count = sample_count;
  spec.true_symmetry = symmetry_of(kind);
  switch (kind) {
    case ShapeKind::cylinder: spec.dimensions = {0.05, 0.2}; break;
    case ShapeKind::cone: spec.dimensions = {0.05, 0.15}; break;
    case ShapeKind::box: spec.dimensions = {0.1, 0.2, 0.3}; break;
    case ShapeKind::cube: spec.dimensions = {0.1}; break;
    case ShapeKind::l_bracket: spec.dimensions = {0.12, 0.08, 0.06}; break;
    case ShapeKind::knob: spec.dimensions = {0.03, 0.015, 0.03}; break;
  }
  return spec;
}

PointCloud gen_shape(const ShapeSpec& spec, std::uint64_t seed) {
  if (spec.sample_count < 16) {
    throw ConfigError("sample_count must be at least 16", 0, "sample_count");
  }
  const std::vector<Patch> patches = build_patches(spec);
  std::vector<double> areas;
  for (const auto& p : patches) areas.push_back(area(p));

  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> pick(areas.begin(), areas.end());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PointCloud cloud;
  cloud.reserve(std::size_t(spec.sample_count));
  for (int i = 0; i < spec.sample_count; ++i) {
    const Patch& patch = patches[pick(rng)];
    const double u = unit(rng);
    const double v = unit(rng);
    cloud.push_back(sample(patch, u, v));
  }
  return cloud;
}

}  // namespace s3pose
