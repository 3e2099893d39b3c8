#include "s3pose/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <thread>

#include "s3pose/errors.hpp"

namespace s3pose {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fixed(double v, int digits) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

MetricsReport metrics_of(const std::vector<const SceneResult*>& rows) {
  std::vector<SceneError> errs;
  errs.reserve(rows.size());
  for (const auto* r : rows) errs.push_back({r->rot_err_deg, r->trans_err_cm});
  return summarize(std::move(errs));
}

}  // namespace

Scene bench_scene(const BenchConfig& cfg, ShapeKind shape, int scene_id) {
  const ShapeSpec spec = ShapeSpec::defaults(shape, cfg.sample_count);
  return make_scene(spec, derive_seed(cfg.seed, std::uint64_t(scene_id)),
                    cfg.noise_sigma, cfg.crop);
}

SceneResult run_scene(const BenchConfig& cfg, ShapeKind shape, int scene_id) {
  SceneResult row;
  row.scene_id = scene_id;
  row.shape = shape;
  row.seed = derive_seed(cfg.seed, std::uint64_t(scene_id));
  const SymmetrySpec truth = symmetry_of(shape);
  row.sym_kind = truth.kind;
  try {
    const Scene scene = bench_scene(cfg, shape, scene_id);
    FitConfig fit = cfg.fit;
    fit.seed = derive_seed(row.seed, 2);
    const FitReport report =
        fit_pose(scene.observed, scene.model, cfg.fit_symmetry.value_or(truth.kind), fit,
                 cfg.mode, scene.gt.rotation);
    row.rot_err_deg = rot_error_mod_sym(report.estimate.rotation, scene.gt.rotation, truth);
    row.trans_err_cm = trans_error(report.estimate.translation, scene.gt.translation);
    row.fit_objective = report.final_objective;
  } catch (const Error& e) {
    row.rot_err_deg = row.trans_err_cm = row.fit_objective = kNaN;
    row.error = e.what();
  }
  return row;
}

BenchResult run_benchmark(const BenchConfig& cfg) {
  validate(cfg.fit);
  struct Job {
    ShapeKind shape;
    int scene_id;
  };
  std::vector<Job> jobs;
  for (const auto shape : cfg.shapes) {
    for (int i = 0; i < cfg.n_scenes; ++i) jobs.push_back({shape, int(jobs.size())});
  }

  BenchResult result;
  result.scenes.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j; (j = next.fetch_add(1)) < jobs.size();) {
      result.scenes[j] = run_scene(cfg, jobs[j].shape, jobs[j].scene_id);
    }
  };
  const int n_threads = std::max(1, std::min<int>(cfg.threads, int(jobs.size())));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }

  std::vector<const SceneResult*> all;
  std::map<ShapeKind, std::vector<const SceneResult*>> by_shape;
  for (const auto& r : result.scenes) {
    all.push_back(&r);
    by_shape[r.shape].push_back(&r);
  }
  result.overall = metrics_of(all);
  for (const auto& [shape, rows] : by_shape) result.per_shape[shape] = metrics_of(rows);
  return result;
}

void write_csv(std::ostream& out, const std::vector<SceneResult>& scenes) {
  out << "scene_id,shape,sym_kind,rot_err_deg,trans_err_cm,fit_objective,seed\n";
  for (const auto& r : scenes) {
    out << r.scene_id << ',' << to_string(r.shape) << ',' << to_string(r.sym_kind) << ','
        << fixed(r.rot_err_deg, 6) << ',' << fixed(r.trans_err_cm, 6) << ','
        << fixed(r.fit_objective, 9) << ',' << r.seed << '\n';
  }
}

void write_summary(std::ostream& out, const BenchResult& result) {
  auto line = [&](const std::string& name, const MetricsReport& m) {
    out << name << "  n=" << m.per_scene.size() << "  failed=" << m.failures
        << "  rot_mean=" << fixed(m.mean_rot_deg, 3)
        << "  rot_median=" << fixed(m.median_rot_deg, 3)
        << "  trans_mean=" << fixed(m.mean_trans_cm, 3)
        << "  trans_median=" << fixed(m.median_trans_cm, 3);
    for (std::size_t i = 0; i < m.ap.size(); ++i) {
      out << "  AP" << kApThresholds[i].degrees << "d" << kApThresholds[i].centimeters
          << "cm=" << fixed(m.ap[i], 1);
    }
    out << '\n';
  };
  for (const auto& [shape, m] : result.per_shape) line(std::string(to_string(shape)), m);
  line("all", result.overall);
}

}  // namespace s3pose
