#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "s3pose/point_cloud.hpp"
#include "s3pose/symmetry.hpp"

namespace s3pose {

enum class ShapeKind { cylinder, cone, box, cube, l_bracket, knob };

std::string_view to_string(ShapeKind kind);
/// Throws ConfigError for an unknown name.
ShapeKind parse_shape_kind(std::string_view name);

/// A synthetic part in its canonical frame, centered on its bounding box.
///
/// Dimensions (meters) by kind:
///   cylinder   radius, height               axis along z
///   cone       base radius, height          apex at +z
///   box        size x, size y, size z       closed cuboid
///   cube       side
///   l_bracket  leg along x, leg along y, width along z; the y-leg is
///              extruded over 2/3 of the width, which breaks every symmetry
///   knob       base radius, base height, stem height; stem radius is a third
///              of the base radius
struct ShapeSpec {
  ShapeKind kind = ShapeKind::cylinder;
  std::vector<double> dimensions;
  SymmetrySpec true_symmetry;
  int sample_count = 1024;

  /// Default dimensions and the true symmetry of the kind.
  static ShapeSpec defaults(ShapeKind kind, int sample_count = 1024);
};

/// Symmetry implied by the kind: rotational about z for cylinder, cone and
/// knob; mirror planes x, y, z for box and cube; none for l_bracket.
SymmetrySpec symmetry_of(ShapeKind kind);

/// Area-weighted uniform surface sampling; exactly spec.sample_count points,
/// deterministic in `seed`. Throws ConfigError for invalid dimensions.
PointCloud gen_shape(const ShapeSpec& spec, std::uint64_t seed);

}  // namespace s3pose
