#pragma once

// Plain-text point files: one "x y z" triple per line in meters, '#' starts a
// comment line, blank lines are skipped.

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "s3pose/point_cloud.hpp"

namespace s3pose {

/// Throws IoError when the file cannot be opened or a line does not parse.
PointCloud read_points(const std::filesystem::path& path);
PointCloud parse_points(std::istream& in, std::string_view source = "<stream>");

/// Writes with round-trip precision, preceded by optional '#' comment lines.
void write_points(const std::filesystem::path& path,
                  std::span<const Eigen::Vector3d> cloud,
                  std::string_view comment = {});
void write_points(std::ostream& out, std::span<const Eigen::Vector3d> cloud,
                  std::string_view comment = {});

}  // namespace s3pose
