#pragma once

// Candidates -> tangent-space refinement -> aggregation, run as a warm-up
// phase over canonical symmetry hypotheses followed by a main phase over the
// symmetry estimated from the model cloud.

#include <cstdint>
#include <memory>
#include <string_view>
#include <optional>
#include <span>
#include <vector>

#include "s3pose/candidate_stats.hpp"
#include "s3pose/losses.hpp"
#include "s3pose/point_cloud.hpp"
#include "s3pose/quaternion.hpp"
#include "s3pose/symmetry.hpp"

namespace s3pose {

struct FitConfig {
  int k = 64;                  // candidates
  double sigma = 0.3;          // candidate perturbation, radians
  int steps = 100;             // main-phase descent iterations
  double eta = 0.5;            // initial step size, halved on non-decrease
  int n_eq = 36;               // equivalent samples per axis
  double beta = 10.0;          // soft-min temperature
  int warmup_steps = 30;       // warm-up descent iterations
  std::uint64_t seed = 0;
  double keep_threshold = 0.25;  // mirror-plane score threshold
  int probe_angles = 8;          // rotational-axis probes
  double fd_step = 1e-4;         // finite-difference step, radians
  /// Query points per cloud in the blind registration objective (strided
  /// subsample; the nearest-neighbor indexes always hold every point).
  int registration_points = 256;
};

/// Throws ConfigError when a field is out of range.
void validate(const FitConfig& cfg);

enum class FitMode { supervised, blind };

std::string_view to_string(FitMode mode);
FitMode parse_fit_mode(std::string_view name);

enum class Phase { warmup, main, final };

std::string_view to_string(Phase phase);

struct TraceEntry {
  Phase phase = Phase::warmup;
  int candidate = -1;  // -1 for the aggregate
  int iteration = 0;
  double value = 0.0;
};

struct FitReport {
  PoseEstimate estimate;
  /// Main-phase objective of every refined candidate; NaN for failures.
  std::vector<double> per_candidate_final_objectives;
  /// Non-negative, summing to one; zero for failed candidates.
  std::vector<double> aggregate_weights;
  SymmetrySpec estimated_symmetry;
  std::vector<TraceEntry> objective_trace;
  /// Main objective at the reported rotation.
  double final_objective = 0.0;
  int failed_candidates = 0;
};

/// q_i = exp(sigma z_i) ⊗ q_init with z_i standard normal in R^3.
CandidateSet generate_candidates(const UnitQuaternion& q_init, int k, double sigma,
                                 std::uint64_t seed);

struct RefineResult {
  UnitQuaternion rotation;
  /// Objective before the first and after every iteration; non-increasing.
  std::vector<double> trace;
};

/// Descent q <- exp(-eta g) ⊗ q with g from rotation_gradient. Rejected steps
/// halve eta; stops after `steps` iterations or once eta < 1e-6.
RefineResult refine_candidate(const UnitQuaternion& q,
                              const RotationObjective& objective, int steps,
                              double eta, double h = 1e-4);

struct AggregateResult {
  UnitQuaternion rotation;
  std::vector<double> weights;
};

/// Boltzmann weights of the objectives at temperature beta, applied to the
/// candidates aligned to the lowest-objective one. Non-finite objectives get
/// zero weight.
AggregateResult aggregate(std::span<const UnitQuaternion> candidates,
                          std::span<const double> objectives, double beta);

/// centroid(P_obs) - R(q) centroid(model).
Eigen::Vector3d estimate_translation(std::span<const Eigen::Vector3d> observed,
                                     std::span<const Eigen::Vector3d> model,
                                     const UnitQuaternion& q);

/// Symmetric Chamfer between the posed model and the observation, with the
/// translation tied to the rotation through estimate_translation.
class RegistrationObjective {
 public:
  RegistrationObjective(std::span<const Eigen::Vector3d> observed,
                        std::span<const Eigen::Vector3d> model,
                        int query_points = 0);

  double operator()(const UnitQuaternion& q) const;

 private:
  class Impl;
  std::shared_ptr<const Impl> impl_;
};

/// The 24 proper rotations mapping the coordinate axes onto themselves.
std::vector<UnitQuaternion> octahedral_rotations();

/// Full pipeline. Supervised mode needs `q_gt`.
FitReport fit_pose(std::span<const Eigen::Vector3d> observed,
                   std::span<const Eigen::Vector3d> model, SymmetryKind sym_kind,
                   const FitConfig& cfg, FitMode mode,
                   const std::optional<UnitQuaternion>& q_gt = std::nullopt);

}  // namespace s3pose
