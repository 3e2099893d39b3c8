// Command-line front end: gen, scene, fit, sym, bench.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "s3pose/bench_config.hpp"
#include "s3pose/benchmark.hpp"
#include "s3pose/errors.hpp"
#include "s3pose/metrics.hpp"
#include "s3pose/point_io.hpp"
#include "s3pose/pose_fitter.hpp"
#include "s3pose/scene.hpp"
#include "s3pose/shapes.hpp"
#include "s3pose/symmetry.hpp"

namespace fs = std::filesystem;
using namespace s3pose;

namespace {

enum Exit { kOk = 0, kConfig = 2, kIo = 3, kNumerical = 4 };

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string vec(const Eigen::Vector3d& v) {
  return num(v.x()) + " " + num(v.y()) + " " + num(v.z());
}

std::string quat(const UnitQuaternion& q) {
  return num(q.w()) + " " + num(q.x()) + " " + num(q.y()) + " " + num(q.z());
}

// Opens --out, or stdout for "" and "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_.open(path, std::ios::binary);
    if (!file_) throw IoError("cannot write " + path);
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

void write_pose_file(const fs::path& path, const Scene& scene, ShapeKind shape,
                     std::uint64_t seed) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "shape = " << to_string(shape) << '\n'
      << "seed = " << seed << '\n'
      << "rotation = " << quat(scene.gt.rotation) << '\n'
      << "translation = " << vec(scene.gt.translation) << '\n'
      << "noise_sigma = " << num(scene.noise_sigma) << '\n'
      << "crop = " << num(scene.crop_fraction) << '\n';
}

struct PoseFile {
  ShapeKind shape = ShapeKind::cylinder;
  RigidTransform gt;
};

PoseFile read_pose_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  PoseFile pf;
  bool have_rotation = false;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    key.erase(key.find_last_not_of(" \t") + 1);
    std::istringstream value(line.substr(eq + 1));
    if (key == "shape") {
      std::string name;
      value >> name;
      pf.shape = parse_shape_kind(name);
    } else if (key == "rotation") {
      Eigen::Vector4d q;
      if (!(value >> q[0] >> q[1] >> q[2] >> q[3])) {
        throw IoError(path.string() + ": malformed rotation");
      }
      pf.gt.rotation = normalize(q);
      have_rotation = true;
    } else if (key == "translation") {
      Eigen::Vector3d& t = pf.gt.translation;
      if (!(value >> t[0] >> t[1] >> t[2])) {
        throw IoError(path.string() + ": malformed translation");
      }
    }
  }
  if (!have_rotation) throw IoError(path.string() + ": missing rotation");
  return pf;
}

void print_symmetry(std::ostream& out, const SymmetrySpec& spec) {
  out << "symmetry: " << to_string(spec.kind) << '\n';
  if (spec.kind == SymmetryKind::rotational) {
    out << "axis_distribution: " << vec(spec.axis_distribution) << '\n'
        << "axis: " << vec(spec.axis()) << '\n';
  }
  for (const auto& n : spec.plane_normals) out << "plane: " << vec(n) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symmetry-aware rotation fitting on synthetic parts"};
  app.require_subcommand(1);

  std::string shape_name = "cylinder";
  std::uint64_t seed = 0;
  std::string out_path;
  std::string config_path;
  std::string mode_name;
  std::optional<int> n_scenes;
  int sample_count = 1024;
  double noise = 0.0;
  double crop = 0.0;
  std::string scene_dir;
  std::string in_path;
  std::string sym_name;
  std::optional<int> threads;

  auto* gen = app.add_subcommand("gen", "Sample a shape and write its point cloud");
  gen->add_option("--shape", shape_name, "cylinder|cone|box|cube|l_bracket|knob");
  gen->add_option("--seed", seed, "Sampling seed");
  gen->add_option("--points", sample_count, "Number of points");
  gen->add_option("--out", out_path, "Output file (default stdout)");

  auto* scene = app.add_subcommand("scene", "Write model, observation and ground truth");
  scene->add_option("--shape", shape_name, "Shape kind");
  scene->add_option("--seed", seed, "Scene seed");
  scene->add_option("--points", sample_count, "Number of model points");
  scene->add_option("--noise", noise, "Noise sigma in meters");
  scene->add_option("--crop", crop, "Cropped fraction in [0, 0.5]");
  scene->add_option("--out", out_path, "Output directory")->required();

  auto* fit = app.add_subcommand("fit", "Fit one scene and print the report");
  fit->add_option("--shape", shape_name, "Shape kind of a generated scene");
  fit->add_option("--seed", seed, "Scene and fit seed");
  fit->add_option("--scene", scene_dir, "Directory written by the scene command");
  fit->add_option("--config", config_path, "Config file; its [fit] section is used");
  fit->add_option("--mode", mode_name, "supervised|blind");
  fit->add_option("--sym", sym_name, "Symmetry kind given to the fitter");
  fit->add_option("--noise", noise, "Noise sigma of a generated scene");
  fit->add_option("--crop", crop, "Crop fraction of a generated scene");
  fit->add_option("--out", out_path, "Report file (default stdout)");

  auto* sym = app.add_subcommand("sym", "Estimate symmetry of a cloud");
  sym->add_option("--in", in_path, "Point file (default: sample --shape)");
  sym->add_option("--shape", shape_name, "Shape kind to sample");
  sym->add_option("--seed", seed, "Sampling seed");
  sym->add_option("--out", out_path, "Report file (default stdout)");

  auto* bench = app.add_subcommand("bench", "Run the benchmark");
  bench->add_option("--config", config_path, "Config file");
  bench->add_option("--seed", seed, "Master seed (overrides the config)");
  bench->add_option("--mode", mode_name, "supervised|blind (overrides the config)");
  bench->add_option("--shape", shape_name, "Run a single shape kind");
  bench->add_option("--n-scenes", n_scenes, "Scenes per shape");
  bench->add_option("--threads", threads, "Worker threads");
  bench->add_option("--out", out_path, "CSV file (overrides the config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (gen->parsed()) {
      ShapeSpec spec = ShapeSpec::defaults(parse_shape_kind(shape_name), sample_count);
      const PointCloud cloud = gen_shape(spec, seed);
      Output out(out_path);
      write_points(out.stream(), cloud,
                   "shape " + std::string(to_string(spec.kind)) + ", seed " +
                       std::to_string(seed));
    } else if (scene->parsed()) {
      const ShapeKind kind = parse_shape_kind(shape_name);
      const Scene s = make_scene(ShapeSpec::defaults(kind, sample_count), seed, noise, crop);
      const fs::path dir(out_path);
      std::error_code ec;
      fs::create_directories(dir, ec);
      if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
      write_points(dir / "model.xyz", s.model, "model, canonical frame");
      write_points(dir / "observed.xyz", s.observed, "observation");
      write_pose_file(dir / "pose.txt", s, kind, seed);
      std::cout << "wrote " << (dir / "model.xyz").string() << ", "
                << (dir / "observed.xyz").string() << ", "
                << (dir / "pose.txt").string() << '\n';
    } else if (fit->parsed()) {
      BenchConfig cfg;
      if (!config_path.empty()) cfg = load_bench_config(config_path);
      FitConfig fc = cfg.fit;
      fc.seed = seed;
      const FitMode mode = mode_name.empty() ? cfg.mode : parse_fit_mode(mode_name);
      Scene s;
      ShapeKind kind = parse_shape_kind(shape_name);
      if (!scene_dir.empty()) {
        const PoseFile pf = read_pose_file(fs::path(scene_dir) / "pose.txt");
        kind = pf.shape;
        s.gt = pf.gt;
        s.model = read_points(fs::path(scene_dir) / "model.xyz");
        s.observed = read_points(fs::path(scene_dir) / "observed.xyz");
        if (s.model.empty() || s.observed.empty()) throw IoError("empty point file");
      } else {
        s = make_scene(ShapeSpec::defaults(kind, cfg.sample_count), seed, noise, crop);
      }
      const SymmetrySpec truth = symmetry_of(kind);
      const SymmetryKind fit_kind =
          sym_name.empty() ? cfg.fit_symmetry.value_or(truth.kind)
                           : parse_symmetry_kind(sym_name);
      const FitReport r = fit_pose(s.observed, s.model, fit_kind, fc, mode, s.gt.rotation);

      Output out_file(out_path);
      std::ostream& out = out_file.stream();
      out << "shape: " << to_string(kind) << '\n'
          << "mode: " << to_string(mode) << '\n'
          << "rotation: " << quat(r.estimate.rotation) << '\n'
          << "translation: " << vec(r.estimate.translation) << '\n'
          << "final_objective: " << num(r.final_objective) << '\n'
          << "failed_candidates: " << r.failed_candidates << '\n';
      print_symmetry(out, r.estimated_symmetry);
      out << "rot_err_deg: "
          << num(rot_error_mod_sym(r.estimate.rotation, s.gt.rotation, truth)) << '\n'
          << "trans_err_cm: " << num(trans_error(r.estimate.translation, s.gt.translation))
          << '\n';
      out << "candidates:\n";
      for (std::size_t i = 0; i < r.aggregate_weights.size(); ++i) {
        out << "  " << i << " objective=" << num(r.per_candidate_final_objectives[i])
            << " weight=" << num(r.aggregate_weights[i]) << '\n';
      }
      out << "trace:\n";
      for (const auto& t : r.objective_trace) {
        out << "  " << to_string(t.phase) << ' ' << t.candidate << ' ' << t.iteration
            << ' ' << num(t.value) << '\n';
      }
    } else if (sym->parsed()) {
      const PointCloud cloud =
          in_path.empty()
              ? gen_shape(ShapeSpec::defaults(parse_shape_kind(shape_name)), seed)
              : read_points(in_path);
      if (cloud.empty()) throw IoError("empty point cloud");
      const RotationalAxisEstimate rot = estimate_rotational_axis(cloud);
      const MirrorPlaneEstimate mir = evaluate_mirror_planes(cloud);
      Output out_file(out_path);
      std::ostream& out = out_file.stream();
      out << "rotational_inconsistency: " << vec(rot.inconsistency) << '\n'
          << "axis_distribution: " << vec(rot.distribution) << '\n'
          << "axis: " << vec(rot.axis) << '\n';
      for (int j = 0; j < 3; ++j) {
        out << "plane_candidate: " << vec(mir.candidates[j])
            << " consistency=" << num(mir.consistency[j])
            << " score=" << num(mir.scores[j]) << '\n';
      }
      out << "planes_kept: " << mir.spec.plane_normals.size() << '\n';
    } else if (bench->parsed()) {
      BenchConfig cfg;
      if (!config_path.empty()) cfg = load_bench_config(config_path);
      if (bench->count("--seed")) cfg.seed = seed;
      if (!mode_name.empty()) cfg.mode = parse_fit_mode(mode_name);
      if (bench->count("--shape")) cfg.shapes = {parse_shape_kind(shape_name)};
      if (n_scenes) {
        if (*n_scenes < 0) throw ConfigError("--n-scenes must be >= 0", 0, "n_scenes");
        cfg.n_scenes = *n_scenes;
      }
      if (threads) {
        if (*threads < 1) throw ConfigError("--threads must be >= 1", 0, "threads");
        cfg.threads = *threads;
      }
      if (!out_path.empty()) cfg.csv_path = out_path;

      const BenchResult result = run_benchmark(cfg);
      {
        Output csv(cfg.csv_path);
        write_csv(csv.stream(), result.scenes);
      }
      if (!cfg.summary_path.empty()) {
        Output summary(cfg.summary_path);
        write_summary(summary.stream(), result);
      }
      write_summary(cfg.csv_path.empty() || cfg.csv_path == "-" ? std::cerr : std::cout,
                    result);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  }
  return kOk;
}
