#include "s3pose/point_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "s3pose/errors.hpp"

namespace s3pose {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

PointCloud parse_points(std::istream& in, std::string_view source) {
  PointCloud out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view rest = trim(line);
    if (rest.empty() || rest.front() == '#') continue;
    Eigen::Vector3d p;
    for (int d = 0; d < 3; ++d) {
      rest = trim(rest);
      const auto r = std::from_chars(rest.data(), rest.data() + rest.size(), p[d]);
      if (r.ec != std::errc() || !std::isfinite(p[d])) {
        throw IoError(std::string(source) + ":" + std::to_string(line_no) +
                      ": expected three numbers");
      }
      rest = rest.substr(std::size_t(r.ptr - rest.data()));
      if (d < 2 && !rest.empty() && rest.front() != ' ' && rest.front() != '\t') {
        throw IoError(std::string(source) + ":" + std::to_string(line_no) +
                      ": expected whitespace between coordinates");
      }
    }
    if (!trim(rest).empty()) {
      throw IoError(std::string(source) + ":" + std::to_string(line_no) +
                    ": trailing characters");
    }
    out.push_back(p);
  }
  return out;
}

PointCloud read_points(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_points(in, path.string());
}

void write_points(std::ostream& out, std::span<const Eigen::Vector3d> cloud,
                  std::string_view comment) {
  std::size_t start = 0;
  while (start < comment.size()) {
    auto end = comment.find('\n', start);
    if (end == std::string_view::npos) end = comment.size();
    out << "# " << comment.substr(start, end - start) << '\n';
    start = end + 1;
  }
  char buf[32];
  for (const auto& p : cloud) {
    for (int d = 0; d < 3; ++d) {
      const auto r = std::to_chars(buf, buf + sizeof buf, p[d]);
      if (d) out << ' ';
      out.write(buf, r.ptr - buf);
    }
    out << '\n';
  }
}

void write_points(const std::filesystem::path& path,
                  std::span<const Eigen::Vector3d> cloud, std::string_view comment) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_points(out, cloud, comment);
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace s3pose
