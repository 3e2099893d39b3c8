#include "s3pose/pose_fitter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "s3pose/errors.hpp"
#include "s3pose/nearest_neighbor.hpp"

namespace s3pose {

namespace {

constexpr double kMinEta = 1e-6;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require(bool ok, const char* field, const std::string& message) {
  if (!ok) throw ConfigError(message, 0, field);
}

// Objectives for one run, fixed once the phase is known.
struct PhaseObjectives {
  RotationObjective candidate;  // per-candidate descent
  RotationObjective aggregate;  // the aggregated rotation
};

PhaseObjectives supervised_warmup(SymmetryKind kind,
                                  std::span<const Eigen::Vector3d> model,
                                  const UnitQuaternion& q_gt,
                                  const FitConfig& cfg) {
  const SoftMinConfig sm{cfg.beta};
  switch (kind) {
    case SymmetryKind::rotational: {
      auto sets = canonical_rotational_sets(q_gt, cfg.n_eq);
      RotationObjective f = [sets, sm](const UnitQuaternion& q) {
        return warmup_loss(std::span(&q, 1), sets, sm);
      };
      return {f, f};
    }
    case SymmetryKind::mirror: {
      auto sets = canonical_mirror_sets(q_gt);
      const std::array<Eigen::Vector3d, 3> axes{
          Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY(),
          Eigen::Vector3d::UnitZ()};
      // The geometric term does not depend on the pose.
      const double geom = mean_mirror_consistency(model, axes);
      RotationObjective f = [sets, sm, geom](const UnitQuaternion& q) {
        return warmup_loss(std::span(&q, 1), sets, sm) + geom;
      };
      return {f, f};
    }
    case SymmetryKind::asymmetric:
      break;
  }
  RotationObjective f = [q_gt](const UnitQuaternion& q) {
    return asym_loss(q, q_gt);
  };
  return {f, f};
}

PhaseObjectives supervised_main(const SymmetrySpec& spec,
                                std::span<const Eigen::Vector3d> model,
                                const UnitQuaternion& q_gt, const FitConfig& cfg) {
  const SoftMinConfig sm{cfg.beta};
  switch (spec.kind) {
    case SymmetryKind::rotational: {
      auto eq = equivalent_set_rotational(q_gt, spec.axis(), cfg.n_eq);
      RotationObjective f = [eq, sm](const UnitQuaternion& q) {
        return soft_distance(q, eq, sm);
      };
      return {f, f};
    }
    case SymmetryKind::mirror: {
      auto eq = equivalent_set_mirror(q_gt, spec.plane_normals);
      const double geom = mean_mirror_consistency(model, spec.plane_normals);
      RotationObjective cand = [eq, sm, geom](const UnitQuaternion& q) {
        return cand_rot_loss(std::span(&q, 1), eq, sm) + geom;
      };
      RotationObjective fin = [eq, sm, geom](const UnitQuaternion& q) {
        return final_rot_loss(q, eq, sm) + geom;
      };
      return {cand, fin};
    }
    case SymmetryKind::asymmetric:
      break;
  }
  RotationObjective f = [q_gt](const UnitQuaternion& q) {
    return asym_loss(q, q_gt);
  };
  return {f, f};
}

SymmetrySpec estimate_symmetry(SymmetryKind kind,
                               std::span<const Eigen::Vector3d> model,
                               const FitConfig& cfg) {
  switch (kind) {
    case SymmetryKind::rotational:
      return SymmetrySpec::rotational(
          estimate_rotational_axis(model, cfg.probe_angles).distribution);
    case SymmetryKind::mirror: {
      auto est = evaluate_mirror_planes(model, cfg.keep_threshold, cfg.probe_angles);
      if (est.spec.plane_normals.empty()) return SymmetrySpec::asymmetric();
      return est.spec;
    }
    case SymmetryKind::asymmetric:
      break;
  }
  return SymmetrySpec::asymmetric();
}

}  // namespace

void validate(const FitConfig& cfg) {
  require(cfg.k >= 1, "k", "k must be at least 1");
  require(cfg.sigma >= 0.0 && std::isfinite(cfg.sigma), "sigma",
          "sigma must be finite and non-negative");
  require(cfg.steps >= 1, "steps", "steps must be at least 1");
  require(cfg.eta > 0.0 && std::isfinite(cfg.eta), "eta", "eta must be positive");
  require(cfg.n_eq >= 1, "n_eq", "n_eq must be at least 1");
  require(cfg.beta > 0.0 && std::isfinite(cfg.beta), "beta", "beta must be positive");
  require(cfg.warmup_steps >= 1, "warmup_steps", "warmup_steps must be at least 1");
  require(cfg.keep_threshold >= 0.0 && cfg.keep_threshold <= 1.0, "keep_threshold",
          "keep_threshold must lie in [0, 1]");
  require(cfg.probe_angles >= 1, "probe_angles", "probe_angles must be at least 1");
  require(cfg.fd_step > 1e-7 && cfg.fd_step < 1e-2, "fd_step",
          "fd_step must lie in (1e-7, 1e-2)");
  require(cfg.registration_points >= 0, "registration_points",
          "registration_points must be non-negative");
}

std::string_view to_string(FitMode mode) {
  return mode == FitMode::supervised ? "supervised" : "blind";
}

FitMode parse_fit_mode(std::string_view name) {
  if (name == "supervised") return FitMode::supervised;
  if (name == "blind") return FitMode::blind;
  throw ConfigError("unknown fit mode '" + std::string(name) + "'", 0, "mode");
}

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::warmup: return "warmup";
    case Phase::main: return "main";
    case Phase::final: return "final";
  }
  return "unknown";
}

CandidateSet generate_candidates(const UnitQuaternion& q_init, int k, double sigma,
                                 std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be non-negative");
  CandidateSet out;
  out.reserve(std::size_t(std::max(k, 0)));
  for (int i = 0; i < k; ++i) {
    // One stream per candidate so candidates can be drawn independently.
    std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32),
                      std::uint32_t(i)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal;
    Eigen::Vector3d z;
    for (int d = 0; d < 3; ++d) z[d] = normal(rng);
    out.push_back(compose(exp_map(TangentVector(sigma * z)), q_init));
  }
  return out;
}

RefineResult refine_candidate(const UnitQuaternion& q,
                              const RotationObjective& objective, int steps,
                              double eta, double h) {
  RefineResult result{q, {}};
  double f = objective(q);
  if (!std::isfinite(f)) throw NonFiniteObjective("objective is not finite at the start");
  result.trace.reserve(std::size_t(std::max(steps, 0)) + 1);
  result.trace.push_back(f);
  Eigen::Vector3d g = rotation_gradient(objective, result.rotation, h);
  for (int it = 0; it < steps && eta >= kMinEta; ++it) {
    const UnitQuaternion trial =
        compose(exp_map(TangentVector(-eta * g)), result.rotation);
    const double f_trial = objective(trial);
    if (std::isfinite(f_trial) && f_trial < f) {
      result.rotation = trial;
      f = f_trial;
      g = rotation_gradient(objective, result.rotation, h);
    } else {
      eta *= 0.5;
    }
    result.trace.push_back(f);
  }
  return result;
}

AggregateResult aggregate(std::span<const UnitQuaternion> candidates,
                          std::span<const double> objectives, double beta) {
  if (candidates.empty() || candidates.size() != objectives.size()) {
    throw std::invalid_argument("aggregate needs one objective per candidate");
  }
  std::size_t best = candidates.size();
  for (std::size_t i = 0; i < objectives.size(); ++i) {
    if (!std::isfinite(objectives[i])) continue;
    if (best == candidates.size() || objectives[i] < objectives[best]) best = i;
  }
  if (best == candidates.size()) throw DegenerateMean("no candidate has a finite objective");

  AggregateResult out;
  out.weights.assign(candidates.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < objectives.size(); ++i) {
    if (!std::isfinite(objectives[i])) continue;
    out.weights[i] = std::exp(-beta * (objectives[i] - objectives[best]));
    total += out.weights[i];
  }
  Eigen::Vector4d sum = Eigen::Vector4d::Zero();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    out.weights[i] /= total;
    sum += out.weights[i] * hemisphere_align(candidates[i], candidates[best]).coeffs();
  }
  if (sum.norm() <= 1e-9) throw DegenerateMean("weighted quaternion sum vanishes");
  out.rotation = normalize(sum);
  return out;
}

Eigen::Vector3d estimate_translation(std::span<const Eigen::Vector3d> observed,
                                     std::span<const Eigen::Vector3d> model,
                                     const UnitQuaternion& q) {
  if (observed.empty() || model.empty()) {
    throw std::invalid_argument("estimate_translation needs non-empty clouds");
  }
  return centroid(observed) - q.rotate(centroid(model));
}

class RegistrationObjective::Impl {
 public:
  Impl(std::span<const Eigen::Vector3d> observed,
       std::span<const Eigen::Vector3d> model, int query_points)
      : obs_index_(PointCloud(observed.begin(), observed.end())),
        model_index_(PointCloud(model.begin(), model.end())),
        obs_centroid_(centroid(observed)),
        model_centroid_(centroid(model)),
        obs_queries_(strided(observed, query_points)),
        model_queries_(strided(model, query_points)) {}

  double operator()(const UnitQuaternion& q) const {
    const Eigen::Vector3d t = obs_centroid_ - q.rotate(model_centroid_);
    const UnitQuaternion q_inv = inverse(q);
    double forward = 0.0;
    for (const auto& m : model_queries_) {
      forward += obs_index_.nearest_distance(q.rotate(m) + t);
    }
    double backward = 0.0;
    for (const auto& p : obs_queries_) {
      backward += model_index_.nearest_distance(q_inv.rotate(p - t));
    }
    return 0.5 * (forward / double(model_queries_.size()) +
                  backward / double(obs_queries_.size()));
  }

 private:
  static PointCloud strided(std::span<const Eigen::Vector3d> cloud, int limit) {
    if (limit <= 0 || cloud.size() <= std::size_t(limit)) {
      return PointCloud(cloud.begin(), cloud.end());
    }
    PointCloud out;
    out.reserve(std::size_t(limit));
    for (int i = 0; i < limit; ++i) {
      out.push_back(cloud[std::size_t(i) * cloud.size() / std::size_t(limit)]);
    }
    return out;
  }

  NearestNeighborIndex obs_index_;
  NearestNeighborIndex model_index_;
  Eigen::Vector3d obs_centroid_;
  Eigen::Vector3d model_centroid_;
  PointCloud obs_queries_;
  PointCloud model_queries_;
};

RegistrationObjective::RegistrationObjective(std::span<const Eigen::Vector3d> observed,
                                             std::span<const Eigen::Vector3d> model,
                                             int query_points) {
  if (observed.empty() || model.empty()) {
    throw std::invalid_argument("registration needs non-empty clouds");
  }
  impl_ = std::make_shared<const Impl>(observed, model, query_points);
}

double RegistrationObjective::operator()(const UnitQuaternion& q) const {
  return (*impl_)(q);
}

std::vector<UnitQuaternion> octahedral_rotations() {
  std::vector<UnitQuaternion> out;
  // Identity and the three half-turns about the coordinate axes.
  for (int a = 0; a < 4; ++a) out.push_back(normalize(Eigen::Vector4d::Unit(a)));
  // Thirds of a turn about the cube diagonals.
  for (int s = 0; s < 8; ++s) {
    out.push_back(normalize(Eigen::Vector4d(1.0, (s & 1) ? -1.0 : 1.0,
                                            (s & 2) ? -1.0 : 1.0,
                                            (s & 4) ? -1.0 : 1.0)));
  }
  // Quarter turns about the axes and half-turns about the edge diagonals.
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) {
      for (double sign : {1.0, -1.0}) {
        Eigen::Vector4d v = Eigen::Vector4d::Zero();
        v[a] = 1.0;
        v[b] = sign;
        out.push_back(normalize(v));
      }
    }
  }
  return out;
}

FitReport fit_pose(std::span<const Eigen::Vector3d> observed,
                   std::span<const Eigen::Vector3d> model, SymmetryKind sym_kind,
                   const FitConfig& cfg, FitMode mode,
                   const std::optional<UnitQuaternion>& q_gt) {
  validate(cfg);
  if (observed.empty() || model.empty()) {
    throw std::invalid_argument("fit_pose needs non-empty clouds");
  }
  if (mode == FitMode::supervised && !q_gt) {
    throw std::invalid_argument("supervised fitting needs a ground-truth rotation");
  }

  FitReport report;
  std::optional<RegistrationObjective> registration;
  if (mode == FitMode::blind) {
    registration.emplace(observed, model, cfg.registration_points);
  }

  UnitQuaternion q_init;
  if (mode == FitMode::supervised) {
    std::seed_seq seq{std::uint32_t(cfg.seed), std::uint32_t(cfg.seed >> 32),
                      0x1u};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal;
    Eigen::Vector3d z;
    for (int d = 0; d < 3; ++d) z[d] = normal(rng);
    q_init = compose(exp_map(TangentVector(cfg.sigma * z)), *q_gt);
  } else {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : octahedral_rotations()) {
      const double f = (*registration)(q);
      if (f < best) {
        best = f;
        q_init = q;
      }
    }
  }

  CandidateSet candidates = generate_candidates(q_init, cfg.k, cfg.sigma, cfg.seed);
  std::vector<bool> alive(candidates.size(), true);

  auto run_phase = [&](Phase phase, const RotationObjective& objective, int steps,
                       std::vector<double>* finals) {
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (!alive[i]) continue;
      try {
        RefineResult r = refine_candidate(candidates[i], objective, steps, cfg.eta,
                                          cfg.fd_step);
        candidates[i] = r.rotation;
        for (std::size_t it = 0; it < r.trace.size(); ++it) {
          report.objective_trace.push_back({phase, int(i), int(it), r.trace[it]});
        }
        if (finals) (*finals)[i] = r.trace.back();
      } catch (const NumericalError&) {
        alive[i] = false;
        ++report.failed_candidates;
      }
    }
    if (2 * (cfg.k - report.failed_candidates) < cfg.k) {
      throw NonFiniteObjective(std::to_string(report.failed_candidates) + " of " +
                               std::to_string(cfg.k) + " candidates failed");
    }
  };

  RotationObjective registration_objective;
  if (registration) {
    registration_objective = [reg = *registration](const UnitQuaternion& q) {
      return reg(q);
    };
  }

  const PhaseObjectives warmup =
      mode == FitMode::blind
          ? PhaseObjectives{registration_objective, registration_objective}
          : supervised_warmup(sym_kind, model, *q_gt, cfg);
  run_phase(Phase::warmup, warmup.candidate, cfg.warmup_steps, nullptr);

  report.estimated_symmetry = estimate_symmetry(sym_kind, model, cfg);

  const PhaseObjectives main =
      mode == FitMode::blind
          ? PhaseObjectives{registration_objective, registration_objective}
          : supervised_main(report.estimated_symmetry, model, *q_gt, cfg);
  report.per_candidate_final_objectives.assign(candidates.size(), kNaN);
  run_phase(Phase::main, main.candidate, cfg.steps,
            &report.per_candidate_final_objectives);

  AggregateResult agg =
      aggregate(candidates, report.per_candidate_final_objectives, cfg.beta);
  report.aggregate_weights = std::move(agg.weights);

  RefineResult fin =
      refine_candidate(agg.rotation, main.aggregate, cfg.steps, cfg.eta, cfg.fd_step);
  for (std::size_t it = 0; it < fin.trace.size(); ++it) {
    report.objective_trace.push_back({Phase::final, -1, int(it), fin.trace[it]});
  }
  report.final_objective = fin.trace.back();
  report.estimate.rotation = fin.rotation;
  report.estimate.translation = estimate_translation(observed, model, fin.rotation);
  return report;
}

}  // namespace s3pose
